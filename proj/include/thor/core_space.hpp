#pragma once

// The inner-product feature space: tensor similarity, sliding correlation,
// tapered windows and normalization.

#include <cstdint>
#include <span>
#include <vector>

#include "thor/feature_tensor.hpp"

namespace thor {

// Row-major 2D grid of reals. Used for spatial masks.
struct Grid {
  int height = 0;
  int width = 0;
  std::vector<double> values;

  Grid() = default;
  Grid(int h, int w, double fill = 0.0) : height(h), width(w), values(static_cast<std::size_t>(h) * w, fill) {}

  double& at(int y, int x) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

struct Peak {
  double value = 0.0;
  int row = 0;
  int col = 0;
};

// 2D similarity response of one template over a search region.
class ActivationMap {
 public:
  ActivationMap() = default;
  ActivationMap(int height, int width, std::vector<double> scores, std::uint64_t template_id = 0,
                int scale_index = 0);

  int height() const { return height_; }
  int width() const { return width_; }
  std::uint64_t template_id() const { return template_id_; }
  int scale_index() const { return scale_index_; }
  void set_template_id(std::uint64_t id) { template_id_ = id; }
  void set_scale_index(int index) { scale_index_ = index; }

  double at(int row, int col) const { return scores_[static_cast<std::size_t>(row) * width_ + col]; }
  double& at(int row, int col) { return scores_[static_cast<std::size_t>(row) * width_ + col]; }
  std::span<const double> scores() const { return scores_; }
  std::span<double> scores() { return scores_; }

  // Maximum score and its first location in row-major order.
  Peak peak() const;
  double min() const;

  friend bool operator==(const ActivationMap&, const ActivationMap&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> scores_;
  std::uint64_t template_id_ = 0;
  int scale_index_ = 0;
};

// Flattened dot product of two same-shape tensors.
double inner_product(const FeatureTensor& a, const FeatureTensor& b);

// Valid-mode cross-correlation (no kernel flip), summed over channels.
// Output is (search.h - kernel.h + 1) x (search.w - kernel.w + 1).
ActivationMap cross_correlate(const FeatureTensor& kernel, const FeatureTensor& search);

// Correlates every kernel against the same search tensor. Kernels are processed
// in register-blocked groups that share search loads; each output cell is
// accumulated in the same (channel, row, column) order as cross_correlate, so
// the result is bit-identical to calling cross_correlate per kernel.
std::vector<ActivationMap> batch_cross_correlate(std::span<const FeatureTensor> kernels,
                                                 const FeatureTensor& search);

// 1D Tukey window of the given length. alpha = 0 is rectangular, alpha = 1 is Hann.
std::vector<double> tukey_window(int length, double alpha);

// Outer product of two 1D Tukey windows.
Grid tapered_cosine_window(int height, int width, double alpha);

// Multiplies every channel of f by the spatial mask.
FeatureTensor apply_mask(const FeatureTensor& f, const Grid& mask);

// Scales f to unit L2 norm. Throws DegenerateInputError for a zero tensor.
FeatureTensor l2_normalize(const FeatureTensor& f);

}  // namespace thor
