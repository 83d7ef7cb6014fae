#include "thor/bench/sequence.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "thor/errors.hpp"

namespace thor::bench {

namespace fs = std::filesystem;

namespace {

bool is_image(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp";
}

}  // namespace

cv::Mat Sequence::load_frame(int index) const {
  const auto& path = frame_paths.at(static_cast<std::size_t>(index));
  cv::Mat img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (img.empty()) throw IngestionError("cannot read frame " + path.string());
  if (img.channels() == 4) cv::cvtColor(img, img, cv::COLOR_BGRA2BGR);
  if (img.depth() != CV_8U) {
    cv::Mat f;
    img.convertTo(f, CV_32F);
    img = f;
  }
  return img;
}

std::optional<BoundingBox> parse_groundtruth_line(const std::string& line, int line_number) {
  std::string cleaned = line;
  for (char& c : cleaned) {
    if (c == ',' || c == '\t' || c == ';' || c == '\r') c = ' ';
  }
  std::istringstream is(cleaned);
  std::vector<double> values;
  std::string token;
  while (is >> token) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw IngestionError("groundtruth line " + std::to_string(line_number) + ": cannot parse '" + token + "'");
    }
  }
  if (values.empty()) return std::nullopt;
  if (values.size() != 4) {
    throw IngestionError("groundtruth line " + std::to_string(line_number) + ": expected 4 values, got " +
                         std::to_string(values.size()));
  }
  return BoundingBox{values[0] - 1.0, values[1] - 1.0, values[2], values[3]};
}

Sequence load_otb_sequence(const fs::path& dir) {
  const fs::path img_dir = dir / "img";
  const fs::path gt_path = dir / "groundtruth_rect.txt";
  if (!fs::is_directory(img_dir)) throw IngestionError("missing frame directory " + img_dir.string());
  std::ifstream is(gt_path);
  if (!is) throw IngestionError("missing annotations " + gt_path.string());

  Sequence seq;
  seq.name = dir.filename().string();
  if (seq.name.empty()) seq.name = dir.parent_path().filename().string();
  for (const auto& entry : fs::directory_iterator(img_dir)) {
    if (entry.is_regular_file() && is_image(entry.path())) seq.frame_paths.push_back(entry.path());
  }
  std::sort(seq.frame_paths.begin(), seq.frame_paths.end());

  std::string line;
  int line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    auto box = parse_groundtruth_line(line, line_number);
    if (!box) continue;
    if (!(box->w > 0.0) || !(box->h > 0.0)) {
      throw IngestionError(gt_path.string() + ": frame " + std::to_string(seq.groundtruth.size()) +
                           " (line " + std::to_string(line_number) + ") has a non-positive box size");
    }
    seq.groundtruth.push_back(*box);
  }
  const std::size_t n = std::min(seq.frame_paths.size(), seq.groundtruth.size());
  seq.frame_paths.resize(n);
  seq.groundtruth.resize(n);
  if (n < 2) throw IngestionError(dir.string() + ": a sequence needs at least 2 annotated frames");
  return seq;
}

std::vector<fs::path> list_sequences(const fs::path& root) {
  if (!fs::is_directory(root)) throw IngestionError("dataset root " + root.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "groundtruth_rect.txt")) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace thor::bench
