#pragma once

// Re-run loop: track a sequence, persist the long-term memory, re-track while
// starting from the saved memory, and repeat until the normalized determinant
// stops moving.

#include <filesystem>
#include <vector>

#include "thor/bench/sequence.hpp"
#include "thor/config.hpp"

namespace thor::bench {

struct PocRecord {
  int run = 0;  // 1-based
  double norm_det = 0.0;
  double auc = 0.0;
  int replaced = 0;
};

inline constexpr double kPocTolerance = 1e-3;

// Relative change between consecutive determinants; 0 when both are zero.
double relative_change(double previous, double current);

// Snapshots go to work_dir/run_NN. Throws ParameterError if max_runs < 2 and
// ExperimentError when a snapshot cannot be written or read back.
std::vector<PocRecord> poc_experiment(const Sequence& seq, const ThorConfig& config, int max_runs,
                                      const std::filesystem::path& work_dir);

}  // namespace thor::bench
