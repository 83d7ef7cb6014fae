#pragma once

#include <span>

namespace thor::bench {

// Area under the success curve: mean over t = 0.00, 0.01, ..., 1.00 of the
// fraction of frames with IoU strictly above t.
double success_auc(std::span<const double> ious);

// Fraction of frames whose center error is at most `threshold` pixels.
double precision_at(std::span<const double> center_errors, double threshold = 20.0);

// Fraction of frames with IoU strictly above `threshold`.
double success_rate(std::span<const double> ious, double threshold);

}  // namespace thor::bench
