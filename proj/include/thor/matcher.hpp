#pragma once

// The template matcher underneath the memory: crop geometry, encoders, and the
// mapping from activation-map cells back to image boxes.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "thor/core_space.hpp"
#include "thor/geometry.hpp"

namespace thor {

// Square crop centered on the box with side pad_factor * max(w, h), resampled
// bilinearly to out_size x out_size. Pixels outside the image replicate the
// nearest edge. Returns CV_32F with the image's channel count.
cv::Mat crop_and_resize(const cv::Mat& image, const BoundingBox& box, double pad_factor, int out_size);

// Square crop around (cx, cy) with the given side length.
cv::Mat crop_square(const cv::Mat& image, double cx, double cy, double side, int out_size);

// Grayscale (luma 0.299 R + 0.587 G + 0.114 B for BGR input), average-pooled by
// `stride`, zero-mean. Single channel.
FeatureTensor encode_ncc(const cv::Mat& patch, int stride = 1);

// Bilinear resampling of a feature-space rectangle (in cells) to out_h x out_w,
// with edge replication. Integer-aligned regions of the output size are copied exactly.
FeatureTensor crop_feature_region(const FeatureTensor& full, double x, double y, double w, double h, int out_h,
                                  int out_w);

// Mean and centered L2 norm of every kh x kw window of `search` (all channels
// pooled), laid out like a valid-mode correlation output.
struct WindowStats {
  Grid mean;
  Grid centered_norm;
};
WindowStats window_stats(const FeatureTensor& search, int kh, int kw);

// Turns raw correlation maps into normalized cross-correlation:
// (<k, s_p> - mean_p * sum(k)) / (|s_p - mean_p|), zero on flat windows.
// maps[i] must come from kernels[i] correlated with `search`.
void normalize_responses(std::span<ActivationMap> maps, std::span<const FeatureTensor> kernels,
                         const WindowStats& stats);

enum class EncoderKind { kNcc, kPrecomputed };

std::string to_string(EncoderKind kind);
EncoderKind parse_encoder_kind(const std::string& name);

struct Frame {
  int index = 0;
  cv::Mat image;  // may be empty for feature-only runs
};

// Embeds a square image region into a feature tensor of
// (out_pixels / stride) x (out_pixels / stride) cells.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual FeatureTensor encode(const Frame& frame, double cx, double cy, double side, int out_pixels) const = 0;
  virtual int stride() const = 0;
  virtual EncoderKind kind() const = 0;
};

class NccEncoder final : public Encoder {
 public:
  explicit NccEncoder(int stride = 4);
  FeatureTensor encode(const Frame& frame, double cx, double cy, double side, int out_pixels) const override;
  int stride() const override { return stride_; }
  EncoderKind kind() const override { return EncoderKind::kNcc; }

 private:
  int stride_;
};

// Contents of meta.json in a precomputed feature directory.
struct FeatureMeta {
  int stride = 0;
  int channels = 0;
  int frame_count = 0;
};

// Per-frame full-image feature maps stored as <dir>/%06d.fts with meta.json.
// Loaded frames are cached; safe to share between threads.
class PrecomputedEncoder final : public Encoder {
 public:
  // expected_stride > 0 must equal the declared stride (ConfigError otherwise).
  explicit PrecomputedEncoder(std::filesystem::path dir, int expected_stride = 0);

  // The feature map of one frame. Missing files raise IngestionError naming the path.
  std::shared_ptr<const FeatureTensor> frame_features(int frame_index) const;
  // Crops a pixel-space region (x, y, w, h) in feature coordinates without resampling
  // beyond the stride division.
  FeatureTensor encode_region(int frame_index, const BoundingBox& region) const;

  FeatureTensor encode(const Frame& frame, double cx, double cy, double side, int out_pixels) const override;
  int stride() const override { return meta_.stride; }
  EncoderKind kind() const override { return EncoderKind::kPrecomputed; }
  const FeatureMeta& meta() const { return meta_; }

 private:
  std::filesystem::path dir_;
  FeatureMeta meta_;
  mutable std::mutex mu_;
  mutable std::map<int, std::shared_ptr<const FeatureTensor>> cache_;
};

FeatureMeta read_feature_meta(const std::filesystem::path& dir);
void write_feature_meta(const FeatureMeta& meta, const std::filesystem::path& dir);
std::string feature_file_name(int frame_index);

// Geometry of one search step: how a map cell at a given scale maps back to the image.
struct SearchGeometry {
  BoundingBox previous_box;
  double region_side = 0.0;  // search region side in image pixels at scale 1.0
  int search_size = 0;       // search crop side in pixels
  int stride = 1;            // crop pixels per feature cell
  int kernel_h = 1;          // template size in cells
  int kernel_w = 1;
  std::vector<double> scales{1.0};
  double scale_penalty = 1.0;
  double window_influence = 0.0;
  bool subpixel = false;  // refine the argmax with a parabola through its neighbours

  // Image-space box for a peak at (row, col) in a map of the given dimensions.
  // Fractional cells are allowed.
  BoundingBox box_at(double row, double col, int map_h, int map_w, int scale_index) const;
};

struct LocatedPeak {
  BoundingBox box;
  double score = 0.0;     // raw map value at the chosen cell
  double adjusted = 0.0;  // value after window blending and scale penalty
  int row = 0;
  int col = 0;
  double sub_row = 0.0;  // row/col plus the sub-cell offset (equal to them without refinement)
  double sub_col = 0.0;
};

// Blends a centered cosine window into the map (weight window_influence),
// applies the scale penalty for scales other than 1.0, and maps the argmax back
// to an image box (previous box scaled by the map's scale, centered on the peak).
LocatedPeak locate_peak(const ActivationMap& map, const SearchGeometry& geometry);

}  // namespace thor
