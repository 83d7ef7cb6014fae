#include "thor/bench/poc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include "thor/bench/runner.hpp"
#include "thor/errors.hpp"
#include "thor/snapshot.hpp"

namespace thor::bench {

namespace fs = std::filesystem;

double relative_change(double previous, double current) {
  const double diff = std::abs(current - previous);
  if (diff == 0.0) return 0.0;
  return diff / std::max(std::abs(previous), 1e-300);
}

std::vector<PocRecord> poc_experiment(const Sequence& seq, const ThorConfig& config, int max_runs,
                                      const fs::path& work_dir) {
  if (max_runs < 2) throw ParameterError("poc_experiment: max_runs must be >= 2");
  std::vector<PocRecord> records;
  std::optional<MemorySnapshot> previous;
  for (int run = 1; run <= max_runs; ++run) {
    const RunResult r = run_ope(seq, config, previous ? &*previous : nullptr);
    PocRecord rec;
    rec.run = run;
    rec.norm_det = r.final_det();
    rec.auc = r.metrics.auc;
    for (const auto& e : r.events) rec.replaced += e.kind == EventKind::kReplaced;
    records.push_back(rec);

    char name[16];
    std::snprintf(name, sizeof(name), "run_%02d", run);
    try {
      save_snapshot(r.final_memory, work_dir / name);
      previous = load_snapshot(work_dir / name);
    } catch (const std::exception& e) {
      throw ExperimentError(std::string("poc run ") + std::to_string(run) + ": " + e.what());
    }
    if (run >= 2 && relative_change(records[run - 2].norm_det, rec.norm_det) < kPocTolerance) break;
  }
  return records;
}

}  // namespace thor::bench
