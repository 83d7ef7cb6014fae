#pragma once

// OTB-layout sequences: <dir>/img/<frames> plus groundtruth_rect.txt with one
// 1-based "x,y,w,h" box per line (commas, tabs or spaces).

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "thor/geometry.hpp"

namespace thor::bench {

struct Sequence {
  std::string name;
  std::vector<std::filesystem::path> frame_paths;
  std::vector<BoundingBox> groundtruth;  // 0-based pixel coordinates

  int size() const { return static_cast<int>(frame_paths.size()); }
  cv::Mat load_frame(int index) const;
};

// Parses one annotation line; nullopt for blank lines. Throws IngestionError
// naming `line_number` on malformed input.
std::optional<BoundingBox> parse_groundtruth_line(const std::string& line, int line_number);

Sequence load_otb_sequence(const std::filesystem::path& dir);

// Every subdirectory of `root` that looks like a sequence, sorted by name.
std::vector<std::filesystem::path> list_sequences(const std::filesystem::path& root);

}  // namespace thor::bench
