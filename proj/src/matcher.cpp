#include "thor/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "thor/errors.hpp"
#include "thor/feature_io.hpp"

namespace thor {

namespace fs = std::filesystem;

namespace {

template <typename T>
void crop_impl(const cv::Mat& image, double cx, double cy, double side, int out_size, cv::Mat& out) {
  const int channels = image.channels();
  const int W = image.cols;
  const int H = image.rows;
  const double step = side / out_size;
  const double left = cx - side / 2.0;
  const double top = cy - side / 2.0;

  std::vector<int> x0(static_cast<std::size_t>(out_size)), x1(x0.size());
  std::vector<float> fx(x0.size());
  for (int u = 0; u < out_size; ++u) {
    const double sx = left + (u + 0.5) * step - 0.5;
    const double fl = std::floor(sx);
    const int xi = static_cast<int>(fl);
    x0[static_cast<std::size_t>(u)] = std::clamp(xi, 0, W - 1);
    x1[static_cast<std::size_t>(u)] = std::clamp(xi + 1, 0, W - 1);
    fx[static_cast<std::size_t>(u)] = static_cast<float>(sx - fl);
  }
  for (int v = 0; v < out_size; ++v) {
    const double sy = top + (v + 0.5) * step - 0.5;
    const double fl = std::floor(sy);
    const int yi = static_cast<int>(fl);
    const T* r0 = image.ptr<T>(std::clamp(yi, 0, H - 1));
    const T* r1 = image.ptr<T>(std::clamp(yi + 1, 0, H - 1));
    const float fy = static_cast<float>(sy - fl);
    float* dst = out.ptr<float>(v);
    for (int u = 0; u < out_size; ++u) {
      const std::size_t ui = static_cast<std::size_t>(u);
      const float wx = fx[ui];
      for (int c = 0; c < channels; ++c) {
        const float a = static_cast<float>(r0[x0[ui] * channels + c]);
        const float b = static_cast<float>(r0[x1[ui] * channels + c]);
        const float d = static_cast<float>(r1[x0[ui] * channels + c]);
        const float e = static_cast<float>(r1[x1[ui] * channels + c]);
        const float top_row = a * (1.0f - wx) + b * wx;
        const float bottom_row = d * (1.0f - wx) + e * wx;
        dst[u * channels + c] = top_row * (1.0f - fy) + bottom_row * fy;
      }
    }
  }
}

}  // namespace

cv::Mat crop_square(const cv::Mat& image, double cx, double cy, double side, int out_size) {
  if (image.empty()) throw ParameterError("crop: empty image");
  if (out_size < 1) throw ParameterError("crop: out_size must be >= 1");
  if (!(side > 0.0) || !std::isfinite(side) || !std::isfinite(cx) || !std::isfinite(cy)) {
    throw ParameterError("crop: degenerate region");
  }
  cv::Mat out(out_size, out_size, CV_MAKETYPE(CV_32F, image.channels()));
  switch (image.depth()) {
    case CV_8U: crop_impl<std::uint8_t>(image, cx, cy, side, out_size, out); break;
    case CV_32F: crop_impl<float>(image, cx, cy, side, out_size, out); break;
    default: {
      cv::Mat f;
      image.convertTo(f, CV_MAKETYPE(CV_32F, image.channels()));
      crop_impl<float>(f, cx, cy, side, out_size, out);
    }
  }
  return out;
}

cv::Mat crop_and_resize(const cv::Mat& image, const BoundingBox& box, double pad_factor, int out_size) {
  if (!box.valid()) throw ParameterError("crop_and_resize: degenerate box " + to_string(box));
  if (!(pad_factor >= 1.0)) throw ParameterError("crop_and_resize: pad_factor must be >= 1");
  return crop_square(image, box.cx(), box.cy(), pad_factor * std::max(box.w, box.h), out_size);
}

FeatureTensor encode_ncc(const cv::Mat& patch, int stride) {
  if (patch.empty()) throw ParameterError("encode_ncc: empty patch");
  if (stride < 1) throw ParameterError("encode_ncc: stride must be >= 1");
  cv::Mat f;
  patch.convertTo(f, CV_MAKETYPE(CV_32F, patch.channels()));
  const int channels = f.channels();
  const int out_h = f.rows / stride;
  const int out_w = f.cols / stride;
  if (out_h < 1 || out_w < 1) throw ParameterError("encode_ncc: patch smaller than stride");

  std::vector<double> gray(static_cast<std::size_t>(f.rows) * f.cols);
  for (int y = 0; y < f.rows; ++y) {
    const float* row = f.ptr<float>(y);
    for (int x = 0; x < f.cols; ++x) {
      double g;
      if (channels >= 3) {
        g = 0.114 * row[x * channels] + 0.587 * row[x * channels + 1] + 0.299 * row[x * channels + 2];
      } else {
        g = row[x * channels];
      }
      gray[static_cast<std::size_t>(y) * f.cols + x] = g;
    }
  }
  std::vector<double> pooled(static_cast<std::size_t>(out_h) * out_w, 0.0);
  const double inv = 1.0 / (static_cast<double>(stride) * stride);
  double sum = 0.0;
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int dy = 0; dy < stride; ++dy) {
        for (int dx = 0; dx < stride; ++dx) {
          acc += gray[static_cast<std::size_t>(y * stride + dy) * f.cols + x * stride + dx];
        }
      }
      pooled[static_cast<std::size_t>(y) * out_w + x] = acc * inv;
      sum += acc * inv;
    }
  }
  const double mean = sum / static_cast<double>(pooled.size());
  for (double& v : pooled) v -= mean;
  return FeatureTensor(1, out_h, out_w, std::move(pooled));
}

FeatureTensor crop_feature_region(const FeatureTensor& full, double x, double y, double w, double h, int out_h,
                                  int out_w) {
  if (full.empty()) throw ParameterError("crop_feature_region: empty feature map");
  if (!(w > 0.0) || !(h > 0.0) || out_h < 1 || out_w < 1) throw ParameterError("crop_feature_region: degenerate region");
  const int H = full.height();
  const int W = full.width();
  FeatureTensor out(full.channels(), out_h, out_w);
  for (int v = 0; v < out_h; ++v) {
    const double sy = y + (v + 0.5) * h / out_h - 0.5;
    const double fy = std::floor(sy);
    const double wy = sy - fy;
    const int y0 = std::clamp(static_cast<int>(fy), 0, H - 1);
    const int y1 = std::clamp(static_cast<int>(fy) + 1, 0, H - 1);
    for (int u = 0; u < out_w; ++u) {
      const double sx = x + (u + 0.5) * w / out_w - 0.5;
      const double fx = std::floor(sx);
      const double wx = sx - fx;
      const int x0 = std::clamp(static_cast<int>(fx), 0, W - 1);
      const int x1 = std::clamp(static_cast<int>(fx) + 1, 0, W - 1);
      for (int c = 0; c < full.channels(); ++c) {
        if (wx == 0.0 && wy == 0.0) {
          out.at(c, v, u) = full.at(c, y0, x0);
          continue;
        }
        const double top = full.at(c, y0, x0) * (1.0 - wx) + full.at(c, y0, x1) * wx;
        const double bottom = full.at(c, y1, x0) * (1.0 - wx) + full.at(c, y1, x1) * wx;
        out.at(c, v, u) = top * (1.0 - wy) + bottom * wy;
      }
    }
  }
  return out;
}

WindowStats window_stats(const FeatureTensor& search, int kh, int kw) {
  if (kh < 1 || kw < 1 || kh > search.height() || kw > search.width()) {
    throw DimensionError("window_stats: window larger than search tensor");
  }
  const int H = search.height();
  const int W = search.width();
  const std::size_t stride = static_cast<std::size_t>(W) + 1;
  std::vector<double> sum((static_cast<std::size_t>(H) + 1) * stride, 0.0);
  std::vector<double> sq(sum.size(), 0.0);
  for (int y = 0; y < H; ++y) {
    double row_sum = 0.0;
    double row_sq = 0.0;
    for (int x = 0; x < W; ++x) {
      for (int c = 0; c < search.channels(); ++c) {
        const double v = search.at(c, y, x);
        row_sum += v;
        row_sq += v * v;
      }
      const std::size_t at = (static_cast<std::size_t>(y) + 1) * stride + x + 1;
      sum[at] = sum[at - stride] + row_sum;
      sq[at] = sq[at - stride] + row_sq;
    }
  }
  auto box = [&](const std::vector<double>& I, int y, int x) {
    const std::size_t y0 = static_cast<std::size_t>(y) * stride;
    const std::size_t y1 = static_cast<std::size_t>(y + kh) * stride;
    return I[y1 + x + kw] - I[y0 + x + kw] - I[y1 + x] + I[y0 + x];
  };
  const double n = static_cast<double>(kh) * kw * search.channels();
  WindowStats stats{Grid(H - kh + 1, W - kw + 1), Grid(H - kh + 1, W - kw + 1)};
  for (int y = 0; y < stats.mean.height; ++y) {
    for (int x = 0; x < stats.mean.width; ++x) {
      const double s = box(sum, y, x);
      const double mean = s / n;
      const double centered = box(sq, y, x) - s * mean;
      stats.mean.at(y, x) = mean;
      stats.centered_norm.at(y, x) = std::sqrt(std::max(centered, 0.0));
    }
  }
  return stats;
}

void normalize_responses(std::span<ActivationMap> maps, std::span<const FeatureTensor> kernels,
                         const WindowStats& stats) {
  if (maps.size() != kernels.size()) throw DimensionError("normalize_responses: one kernel per map required");
  // Windows whose spread is this small relative to the brightest window are flat.
  double max_norm = 0.0;
  for (double v : stats.centered_norm.values) max_norm = std::max(max_norm, v);
  const double flat = 1e-9 * std::max(max_norm, 1.0);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    auto& m = maps[i];
    if (m.height() != stats.mean.height || m.width() != stats.mean.width) {
      throw DimensionError("normalize_responses: map and window statistics differ in size");
    }
    double ksum = 0.0;
    for (double v : kernels[i].data()) ksum += v;
    const double knorm = kernels[i].norm();
    auto scores = m.scores();
    for (std::size_t k = 0; k < scores.size(); ++k) {
      const double denom = stats.centered_norm.values[k] * knorm;
      scores[k] = denom > flat ? (scores[k] - stats.mean.values[k] * ksum) / denom : 0.0;
    }
  }
}

std::string to_string(EncoderKind kind) { return kind == EncoderKind::kNcc ? "ncc" : "precomputed"; }

EncoderKind parse_encoder_kind(const std::string& name) {
  if (name == "ncc") return EncoderKind::kNcc;
  if (name == "precomputed") return EncoderKind::kPrecomputed;
  throw ParameterError("unknown encoder '" + name + "'");
}

NccEncoder::NccEncoder(int stride) : stride_(stride) {
  if (stride < 1) throw ConfigError("NCC encoder stride must be >= 1");
}

FeatureTensor NccEncoder::encode(const Frame& frame, double cx, double cy, double side, int out_pixels) const {
  return encode_ncc(crop_square(frame.image, cx, cy, side, out_pixels), stride_);
}

std::string feature_file_name(int frame_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06d.fts", frame_index);
  return buf;
}

FeatureMeta read_feature_meta(const fs::path& dir) {
  const fs::path path = dir / "meta.json";
  std::ifstream is(path);
  if (!is) throw IngestionError("missing feature metadata " + path.string());
  try {
    const auto j = nlohmann::json::parse(is);
    FeatureMeta meta{j.at("stride").get<int>(), j.at("channels").get<int>(), j.at("frame_count").get<int>()};
    if (meta.stride < 1 || meta.channels < 1 || meta.frame_count < 0) throw ConfigError(path.string() + ": invalid values");
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw IngestionError(path.string() + ": " + e.what());
  }
}

void write_feature_meta(const FeatureMeta& meta, const fs::path& dir) {
  nlohmann::json j = {{"stride", meta.stride}, {"channels", meta.channels}, {"frame_count", meta.frame_count}};
  std::ofstream os(dir / "meta.json", std::ios::trunc);
  if (!os) throw IngestionError("cannot write " + (dir / "meta.json").string());
  os << j.dump(2) << "\n";
}

PrecomputedEncoder::PrecomputedEncoder(fs::path dir, int expected_stride)
    : dir_(std::move(dir)), meta_(read_feature_meta(dir_)) {
  if (expected_stride > 0 && expected_stride != meta_.stride) {
    throw ConfigError("feature stride mismatch: configured " + std::to_string(expected_stride) + ", " +
                      (dir_ / "meta.json").string() + " declares " + std::to_string(meta_.stride));
  }
}

std::shared_ptr<const FeatureTensor> PrecomputedEncoder::frame_features(int frame_index) const {
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(frame_index); it != cache_.end()) return it->second;
  }
  const fs::path path = dir_ / feature_file_name(frame_index);
  if (!fs::exists(path)) throw IngestionError("missing feature file " + path.string());
  FeatureTensor f;
  try {
    f = read_feature_file(path);
  } catch (const FormatError& e) {
    throw IngestionError(e.what());
  }
  if (f.channels() != meta_.channels) {
    throw IngestionError(path.string() + ": " + std::to_string(f.channels()) + " channels, meta.json declares " +
                         std::to_string(meta_.channels));
  }
  auto ptr = std::make_shared<const FeatureTensor>(std::move(f));
  std::lock_guard lock(mu_);
  // Only the most recent frames are worth keeping: tracking walks forward.
  while (cache_.size() >= 4) cache_.erase(cache_.begin());
  cache_.emplace(frame_index, ptr);
  return ptr;
}

FeatureTensor PrecomputedEncoder::encode_region(int frame_index, const BoundingBox& region) const {
  if (!region.valid()) throw ParameterError("encode_region: degenerate region " + to_string(region));
  const auto full = frame_features(frame_index);
  const double s = meta_.stride;
  const int out_w = std::max(1, static_cast<int>(std::lround(region.w / s)));
  const int out_h = std::max(1, static_cast<int>(std::lround(region.h / s)));
  return crop_feature_region(*full, region.x / s, region.y / s, region.w / s, region.h / s, out_h, out_w);
}

FeatureTensor PrecomputedEncoder::encode(const Frame& frame, double cx, double cy, double side, int out_pixels) const {
  if (out_pixels % meta_.stride != 0) {
    throw ConfigError("crop size " + std::to_string(out_pixels) + " is not a multiple of the feature stride " +
                      std::to_string(meta_.stride));
  }
  const auto full = frame_features(frame.index);
  const double s = meta_.stride;
  const int cells = out_pixels / meta_.stride;
  return crop_feature_region(*full, (cx - side / 2.0) / s, (cy - side / 2.0) / s, side / s, side / s, cells, cells);
}

BoundingBox SearchGeometry::box_at(double row, double col, int map_h, int map_w, int scale_index) const {
  const double scale = scales.at(static_cast<std::size_t>(scale_index));
  const double image_per_crop = region_side * scale / search_size;
  const double dx = (col - (map_w - 1) / 2.0) * stride * image_per_crop;
  const double dy = (row - (map_h - 1) / 2.0) * stride * image_per_crop;
  return BoundingBox::from_center(previous_box.cx() + dx, previous_box.cy() + dy, previous_box.w * scale,
                                  previous_box.h * scale);
}

namespace {

// Vertex of the parabola through (-1, a), (0, b), (1, c), clamped to half a cell.
double parabola_offset(double a, double b, double c) {
  const double denom = a - 2.0 * b + c;
  if (!(denom < 0.0)) return 0.0;
  return std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
}

}  // namespace

LocatedPeak locate_peak(const ActivationMap& map, const SearchGeometry& geometry) {
  const auto wy = tukey_window(map.height(), 1.0);
  const auto wx = tukey_window(map.width(), 1.0);
  const double scale = geometry.scales.at(static_cast<std::size_t>(map.scale_index()));
  const double penalty = scale == 1.0 ? 1.0 : geometry.scale_penalty;
  const double wi = geometry.window_influence;
  auto adjusted = [&](int r, int c) {
    const double raw = map.at(r, c);
    const double adj =
        wi != 0.0 ? (1.0 - wi) * raw + wi * wy[static_cast<std::size_t>(r)] * wx[static_cast<std::size_t>(c)] : raw;
    return adj * penalty;
  };

  LocatedPeak best;
  bool first = true;
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      const double adj = adjusted(r, c);
      if (first || adj > best.adjusted) {
        best.adjusted = adj;
        best.score = map.at(r, c);
        best.row = r;
        best.col = c;
        first = false;
      }
    }
  }
  best.sub_row = best.row;
  best.sub_col = best.col;
  if (geometry.subpixel) {
    const int r = best.row, c = best.col;
    if (r > 0 && r + 1 < map.height()) {
      best.sub_row += parabola_offset(map.at(r - 1, c), best.score, map.at(r + 1, c));
    }
    if (c > 0 && c + 1 < map.width()) {
      best.sub_col += parabola_offset(map.at(r, c - 1), best.score, map.at(r, c + 1));
    }
  }
  best.box = geometry.box_at(best.sub_row, best.sub_col, map.height(), map.width(), map.scale_index());
  return best;
}

}  // namespace thor
