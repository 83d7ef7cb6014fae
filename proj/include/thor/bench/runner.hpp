#pragma once

// One-pass evaluation: initialize on the first annotated frame, track to the
// end without resets, then score the predictions against the annotations.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "thor/bench/sequence.hpp"
#include "thor/config.hpp"
#include "thor/snapshot.hpp"
#include "thor/tracker.hpp"

namespace thor::bench {

struct FrameRecord {
  int frame = 0;
  BoundingBox box;
  double score = 0.0;
  Source source = Source::kLongTerm;
  bool reinit = false;
  double det = 0.0;
  double gamma = 0.0;
  double seconds = 0.0;
  bool failed = false;
  // Filled by score_run.
  double iou = 0.0;
  double center_error = 0.0;
};

struct TemplateInfo {
  std::uint64_t id = 0;
  int frame_index = 0;
  BoundingBox capture_box;
  std::optional<std::string> crop_path;
};

struct RunMetrics {
  double auc = 0.0;
  double precision = 0.0;
  double mean_iou = 0.0;
  double success_50 = 0.0;  // fraction of frames with IoU > 0.5
};

struct RunResult {
  std::string sequence;
  ThorConfig config;
  std::vector<FrameRecord> frames;
  std::vector<MemoryEvent> events;
  std::vector<TemplateInfo> initial_slots;  // LTM right after initialization
  MemorySnapshot final_memory;
  std::vector<std::string> failures;
  RunMetrics metrics;

  std::vector<double> ious() const;
  std::vector<double> center_errors() const;
  double final_det() const { return frames.empty() ? 0.0 : frames.back().det; }
};

// Tracks every frame of `seq`. Only groundtruth[0] is read.
RunResult track_sequence(const Sequence& seq, const ThorConfig& config, const MemorySnapshot* reload = nullptr);

// Computes per-frame IoU / center error and the aggregate metrics.
void score_run(RunResult& result, const Sequence& seq);

RunResult run_ope(const Sequence& seq, const ThorConfig& config, const MemorySnapshot* reload = nullptr);

struct DriftReport {
  double mean_norm_det = 0.0;
  int n_drifted = 0;
  int n_lt_updates = 0;
  double relative_drift = 0.0;  // n_drifted / max(n_lt_updates, 1)
};

// A long-term update (Appended or Replaced) counts as drifted when its capture
// box overlaps the annotation of its frame by less than drift_iou.
DriftReport drift_stats(const RunResult& result, const Sequence& seq, double drift_iou = 0.3);
DriftReport aggregate_drift(const std::vector<DriftReport>& reports);

nlohmann::json events_to_json(const std::vector<MemoryEvent>& events);
nlohmann::json run_to_json(const RunResult& result);
std::string trace_csv(const RunResult& result);

// Writes results.json, trace.csv and the final memory snapshot (memory/).
// Wall-clock timings go to timing.json so the other files stay reproducible.
void write_run_outputs(const RunResult& result, const std::filesystem::path& dir, const DriftReport* drift = nullptr);

// What a gallery dump needs from a results.json written by write_run_outputs.
struct StoredRun {
  int frame_count = 0;
  std::vector<TemplateInfo> initial_slots;
  std::vector<MemoryEvent> events;
  std::filesystem::path crop_dir;
};
StoredRun load_stored_run(const std::filesystem::path& results_json);

// Runs many sequences, concurrently when jobs > 1. Results are sorted by name.
std::vector<RunResult> run_many(const std::vector<Sequence>& sequences, const ThorConfig& config, int jobs = 1);

}  // namespace thor::bench
