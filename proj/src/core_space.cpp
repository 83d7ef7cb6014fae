#include "thor/core_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "thor/errors.hpp"

namespace thor {

namespace {

// Norms at or below this are treated as zero by l2_normalize.
constexpr double kZeroNorm = 1e-9;

std::string shape_str(const Shape& s) {
  return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" + std::to_string(s.width);
}

void check_correlation_shapes(const FeatureTensor& kernel, const FeatureTensor& search) {
  if (kernel.empty() || search.empty()) throw DimensionError("cross_correlate: empty tensor");
  if (kernel.channels() != search.channels()) {
    throw DimensionError("cross_correlate: channel mismatch " + shape_str(kernel.shape()) + " vs " +
                         shape_str(search.shape()));
  }
  if (kernel.height() > search.height() || kernel.width() > search.width()) {
    throw DimensionError("cross_correlate: kernel " + shape_str(kernel.shape()) + " larger than search " +
                         shape_str(search.shape()));
  }
}

// Correlates G kernels at once. Accumulators for G kernels x kTile output
// columns stay in registers across the whole (channel, row, column) sweep and
// share each search load. Every cell sums in the same order for any G.
template <int G>
void correlate_group(const FeatureTensor* const* kernels, const FeatureTensor& search, double* const* out,
                     int out_h, int out_w) {
  constexpr int kTile = (G == 1) ? 8 : 4;
  const int channels = search.channels();
  const int kh = kernels[0]->height();
  const int kw = kernels[0]->width();
  const int sh = search.height();
  const int sw = search.width();
  const double* s = search.data().data();
  const double* k[G];
  for (int g = 0; g < G; ++g) k[g] = kernels[g]->data().data();

  for (int y = 0; y < out_h; ++y) {
    int x = 0;
    for (; x + kTile <= out_w; x += kTile) {
      double acc[G][kTile] = {};
      for (int c = 0; c < channels; ++c) {
        for (int i = 0; i < kh; ++i) {
          const double* srow = s + (static_cast<std::size_t>(c) * sh + y + i) * sw + x;
          const std::size_t koff = (static_cast<std::size_t>(c) * kh + i) * kw;
          for (int j = 0; j < kw; ++j) {
            for (int g = 0; g < G; ++g) {
              const double kv = k[g][koff + j];
              for (int t = 0; t < kTile; ++t) acc[g][t] += kv * srow[j + t];
            }
          }
        }
      }
      for (int g = 0; g < G; ++g) {
        for (int t = 0; t < kTile; ++t) out[g][static_cast<std::size_t>(y) * out_w + x + t] = acc[g][t];
      }
    }
    for (; x < out_w; ++x) {
      double acc[G] = {};
      for (int c = 0; c < channels; ++c) {
        for (int i = 0; i < kh; ++i) {
          const double* srow = s + (static_cast<std::size_t>(c) * sh + y + i) * sw + x;
          const std::size_t koff = (static_cast<std::size_t>(c) * kh + i) * kw;
          for (int j = 0; j < kw; ++j) {
            for (int g = 0; g < G; ++g) acc[g] += k[g][koff + j] * srow[j];
          }
        }
      }
      for (int g = 0; g < G; ++g) out[g][static_cast<std::size_t>(y) * out_w + x] = acc[g];
    }
  }
}

}  // namespace

ActivationMap::ActivationMap(int height, int width, std::vector<double> scores, std::uint64_t template_id,
                             int scale_index)
    : height_(height), width_(width), scores_(std::move(scores)), template_id_(template_id), scale_index_(scale_index) {
  if (height < 1 || width < 1) throw DimensionError("activation map dimensions must be positive");
  if (scores_.size() != static_cast<std::size_t>(height) * width) {
    throw DimensionError("activation map score count does not match its dimensions");
  }
  for (double v : scores_) {
    if (!std::isfinite(v)) throw DegenerateInputError("activation map contains a non-finite score");
  }
}

Peak ActivationMap::peak() const {
  Peak p{scores_.empty() ? 0.0 : scores_[0], 0, 0};
  for (std::size_t i = 1; i < scores_.size(); ++i) {
    if (scores_[i] > p.value) {
      p.value = scores_[i];
      p.row = static_cast<int>(i / width_);
      p.col = static_cast<int>(i % width_);
    }
  }
  return p;
}

double ActivationMap::min() const {
  return scores_.empty() ? 0.0 : *std::min_element(scores_.begin(), scores_.end());
}

double inner_product(const FeatureTensor& a, const FeatureTensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("inner_product: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
  const auto da = a.data();
  const auto db = b.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) acc += da[i] * db[i];
  return acc;
}

ActivationMap cross_correlate(const FeatureTensor& kernel, const FeatureTensor& search) {
  return std::move(batch_cross_correlate(std::span<const FeatureTensor>(&kernel, 1), search).front());
}

std::vector<ActivationMap> batch_cross_correlate(std::span<const FeatureTensor> kernels,
                                                 const FeatureTensor& search) {
  std::vector<ActivationMap> maps;
  if (kernels.empty()) return maps;
  for (const auto& k : kernels) {
    check_correlation_shapes(k, search);
    if (k.shape() != kernels[0].shape()) throw DimensionError("batch_cross_correlate: kernels differ in shape");
  }
  const int out_h = search.height() - kernels[0].height() + 1;
  const int out_w = search.width() - kernels[0].width() + 1;
  const std::size_t cells = static_cast<std::size_t>(out_h) * out_w;

  std::vector<std::vector<double>> buffers(kernels.size(), std::vector<double>(cells));
  std::size_t first = 0;
  auto run = [&]<int G>() {
    const FeatureTensor* ks[G];
    double* outs[G];
    for (int g = 0; g < G; ++g) {
      ks[g] = &kernels[first + g];
      outs[g] = buffers[first + g].data();
    }
    correlate_group<G>(ks, search, outs, out_h, out_w);
    first += G;
  };
  while (kernels.size() - first >= 4) run.template operator()<4>();
  switch (kernels.size() - first) {
    case 3: run.template operator()<3>(); break;
    case 2: run.template operator()<2>(); break;
    case 1: run.template operator()<1>(); break;
    default: break;
  }

  maps.reserve(kernels.size());
  for (auto& b : buffers) maps.emplace_back(out_h, out_w, std::move(b));
  return maps;
}

std::vector<double> tukey_window(int length, double alpha) {
  if (length < 1) throw ParameterError("tukey_window: length must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("tukey_window: alpha must lie in [0, 1]");
  std::vector<double> w(static_cast<std::size_t>(length), 1.0);
  if (length == 1 || alpha == 0.0) return w;
  const double span = static_cast<double>(length - 1);
  for (int n = 0; n < length; ++n) {
    // Distance from the nearer edge, so both halves are computed identically.
    const double d = static_cast<double>(std::min(n, length - 1 - n)) / span;
    if (d < alpha / 2.0) w[static_cast<std::size_t>(n)] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * d / alpha));
  }
  return w;
}

Grid tapered_cosine_window(int height, int width, double alpha) {
  if (height < 1 || width < 1) throw ParameterError("tapered_cosine_window: dimensions must be >= 1");
  const auto wy = tukey_window(height, alpha);
  const auto wx = tukey_window(width, alpha);
  Grid g(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) g.at(y, x) = wy[static_cast<std::size_t>(y)] * wx[static_cast<std::size_t>(x)];
  }
  return g;
}

FeatureTensor apply_mask(const FeatureTensor& f, const Grid& mask) {
  if (mask.height != f.height() || mask.width != f.width()) {
    throw DimensionError("apply_mask: mask " + std::to_string(mask.height) + "x" + std::to_string(mask.width) +
                         " does not match tensor " + shape_str(f.shape()));
  }
  FeatureTensor out = f;
  auto d = out.data();
  const std::size_t plane = static_cast<std::size_t>(f.height()) * f.width();
  for (int c = 0; c < f.channels(); ++c) {
    for (std::size_t i = 0; i < plane; ++i) d[c * plane + i] *= mask.values[i];
  }
  return out;
}

FeatureTensor l2_normalize(const FeatureTensor& f) {
  const double n = f.norm();
  if (!(n > kZeroNorm)) throw DegenerateInputError("l2_normalize: tensor has zero norm");
  FeatureTensor out = f;
  for (double& v : out.data()) v /= n;
  return out;
}

}  // namespace thor
