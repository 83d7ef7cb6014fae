#include "thor/bench/metrics.hpp"

#include "thor/errors.hpp"

namespace thor::bench {

namespace {
constexpr int kAucThresholds = 101;
}

double success_rate(std::span<const double> ious, double threshold) {
  if (ious.empty()) throw ParameterError("success_rate: no frames");
  std::size_t above = 0;
  for (double v : ious) above += v > threshold ? 1 : 0;
  return static_cast<double>(above) / static_cast<double>(ious.size());
}

double success_auc(std::span<const double> ious) {
  if (ious.empty()) throw ParameterError("success_auc: no frames");
  for (double v : ious) {
    if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("success_auc: IoU outside [0, 1]");
  }
  double sum = 0.0;
  for (int i = 0; i < kAucThresholds; ++i) sum += success_rate(ious, i / 100.0);
  return sum / kAucThresholds;
}

double precision_at(std::span<const double> center_errors, double threshold) {
  if (center_errors.empty()) throw ParameterError("precision_at: no frames");
  std::size_t within = 0;
  for (double e : center_errors) {
    if (!(e >= 0.0)) throw ParameterError("precision_at: negative center error");
    within += e <= threshold ? 1 : 0;
  }
  return static_cast<double>(within) / static_cast<double>(center_errors.size());
}

}  // namespace thor::bench
