#include "thor/bench/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "thor/bench/metrics.hpp"
#include "thor/errors.hpp"

namespace thor::bench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

TemplateInfo info_of(const Template& t) { return {t.id, t.frame_index, t.capture_box, t.crop_path}; }

json box_json(const BoundingBox& b) { return json::array({b.x, b.y, b.w, b.h}); }

BoundingBox box_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(), j.at(3).get<double>()};
}

EventKind parse_event_kind(const std::string& s) {
  for (auto k : {EventKind::kAppended, EventKind::kReplaced, EventKind::kRejectedBound, EventKind::kRejectedNoGain,
                 EventKind::kReinit}) {
    if (to_string(k) == s) return k;
  }
  throw FormatError("unknown event kind '" + s + "'");
}

}  // namespace

std::vector<double> RunResult::ious() const {
  std::vector<double> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.iou);
  return out;
}

std::vector<double> RunResult::center_errors() const {
  std::vector<double> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.center_error);
  return out;
}

RunResult track_sequence(const Sequence& seq, const ThorConfig& config, const MemorySnapshot* reload) {
  if (seq.size() < 2 || seq.groundtruth.empty()) throw ParameterError("track_sequence: sequence too short");
  using clock = std::chrono::steady_clock;
  RunResult result;
  result.sequence = seq.name;
  result.config = config;

  auto encoder = make_encoder(config);
  const auto t0 = clock::now();
  Frame first{0, seq.load_frame(0)};
  TrackState state = track_init(first, seq.groundtruth.front(), config, encoder, reload);
  for (const auto& t : state.ltm.slots()) result.initial_slots.push_back(info_of(t));

  FrameRecord init;
  init.frame = 0;
  init.box = state.box;
  init.score = 1.0;
  init.source = Source::kLongTerm;
  init.det = state.ltm.capacity_det();
  init.gamma = config.use_memory && config.use_stm ? state.stm.diversity(config.gamma_variant) : 0.0;
  init.seconds = std::chrono::duration<double>(clock::now() - t0).count();
  result.frames.push_back(init);

  for (int i = 1; i < seq.size(); ++i) {
    const auto start = clock::now();
    FrameRecord rec;
    rec.frame = i;
    try {
      Frame frame{i, seq.load_frame(i)};
      FramePrediction p = thor_step(state, frame);
      rec.box = p.box;
      rec.score = p.score;
      rec.source = p.source;
      rec.reinit = p.stm_reinit;
      rec.det = p.det_after;
      rec.gamma = p.gamma_after;
      for (auto& e : p.events) result.events.push_back(std::move(e));
    } catch (const std::exception& e) {
      // Keep the previous box and carry on with the next frame.
      rec.failed = true;
      rec.box = state.box;
      rec.det = state.ltm.capacity_det();
      rec.gamma = result.frames.back().gamma;
      result.failures.push_back("frame " + std::to_string(i) + ": " + e.what());
    }
    rec.seconds = std::chrono::duration<double>(clock::now() - start).count();
    result.frames.push_back(rec);
  }
  result.final_memory = snapshot_of(state.ltm);
  return result;
}

void score_run(RunResult& result, const Sequence& seq) {
  for (auto& f : result.frames) {
    const auto& gt = seq.groundtruth.at(static_cast<std::size_t>(f.frame));
    f.iou = iou(f.box, gt);
    f.center_error = center_distance(f.box, gt);
  }
  const auto ious = result.ious();
  const auto errs = result.center_errors();
  result.metrics.auc = success_auc(ious);
  result.metrics.precision = precision_at(errs, 20.0);
  result.metrics.success_50 = success_rate(ious, 0.5);
  double sum = 0.0;
  for (double v : ious) sum += v;
  result.metrics.mean_iou = sum / static_cast<double>(ious.size());
}

RunResult run_ope(const Sequence& seq, const ThorConfig& config, const MemorySnapshot* reload) {
  RunResult r = track_sequence(seq, config, reload);
  score_run(r, seq);
  return r;
}

DriftReport drift_stats(const RunResult& result, const Sequence& seq, double drift_iou) {
  DriftReport rep;
  for (const auto& e : result.events) {
    if (e.kind != EventKind::kAppended && e.kind != EventKind::kReplaced) continue;
    ++rep.n_lt_updates;
    const auto& gt = seq.groundtruth.at(static_cast<std::size_t>(e.frame_index));
    if (iou(e.capture_box, gt) < drift_iou) ++rep.n_drifted;
  }
  rep.mean_norm_det = result.final_det();
  rep.relative_drift = static_cast<double>(rep.n_drifted) / std::max(rep.n_lt_updates, 1);
  return rep;
}

DriftReport aggregate_drift(const std::vector<DriftReport>& reports) {
  DriftReport out;
  if (reports.empty()) return out;
  double det_sum = 0.0;
  for (const auto& r : reports) {
    det_sum += r.mean_norm_det;
    out.n_drifted += r.n_drifted;
    out.n_lt_updates += r.n_lt_updates;
  }
  out.mean_norm_det = det_sum / static_cast<double>(reports.size());
  out.relative_drift = static_cast<double>(out.n_drifted) / std::max(out.n_lt_updates, 1);
  return out;
}

json events_to_json(const std::vector<MemoryEvent>& events) {
  json arr = json::array();
  for (const auto& e : events) {
    json j = {{"kind", to_string(e.kind)},
              {"frame", e.frame_index},
              {"slot", e.slot},
              {"template_id", e.template_id},
              {"capture_box", box_json(e.capture_box)},
              {"det", e.det}};
    if (e.kind == EventKind::kReplaced) j["evicted_id"] = e.evicted_id;
    if (e.crop_path) j["crop_path"] = *e.crop_path;
    arr.push_back(std::move(j));
  }
  return arr;
}

json run_to_json(const RunResult& r) {
  json slots_init = json::array();
  for (const auto& t : r.initial_slots) {
    json j = {{"id", t.id}, {"frame_index", t.frame_index}, {"capture_box", box_json(t.capture_box)}};
    if (t.crop_path) j["crop_path"] = *t.crop_path;
    slots_init.push_back(std::move(j));
  }
  json final_slots = json::array();
  for (const auto& t : r.final_memory.templates) {
    final_slots.push_back({{"id", t.id}, {"frame_index", t.frame_index}, {"capture_box", box_json(t.capture_box)}});
  }
  int counts[5] = {0, 0, 0, 0, 0};
  for (const auto& e : r.events) ++counts[static_cast<int>(e.kind)];
  json j;
  j["sequence"] = r.sequence;
  j["frames"] = r.frames.size();
  j["config"] = r.config;
  j["metrics"] = {{"auc", r.metrics.auc},
                  {"precision_20px", r.metrics.precision},
                  {"mean_iou", r.metrics.mean_iou},
                  {"success_50", r.metrics.success_50}};
  j["memory"] = {{"final_normalized_det", r.final_det()},
                 {"final_slots", final_slots},
                 {"initial_slots", slots_init},
                 {"appended", counts[static_cast<int>(EventKind::kAppended)]},
                 {"replaced", counts[static_cast<int>(EventKind::kReplaced)]},
                 {"rejected_bound", counts[static_cast<int>(EventKind::kRejectedBound)]},
                 {"rejected_no_gain", counts[static_cast<int>(EventKind::kRejectedNoGain)]},
                 {"stm_reinits", counts[static_cast<int>(EventKind::kReinit)]}};
  j["events"] = events_to_json(r.events);
  j["failures"] = r.failures;
  j["note"] = "VOT-style metrics (EAO, accuracy, reset-based robustness) are not computed; only one-pass "
              "evaluation (AUC, precision) is supported.";
  return j;
}

std::string trace_csv(const RunResult& r) {
  std::string out = "frame,x,y,w,h,iou,score,det,gamma,source,reinit\n";
  char buf[512];
  for (const auto& f : r.frames) {
    std::snprintf(buf, sizeof(buf), "%d,%.4f,%.4f,%.4f,%.4f,%.6f,%.6f,%.10g,%.6f,%s,%d\n", f.frame, f.box.x, f.box.y,
                  f.box.w, f.box.h, f.iou, f.score, f.det, f.gamma, to_string(f.source).c_str(), f.reinit ? 1 : 0);
    out += buf;
  }
  return out;
}

void write_run_outputs(const RunResult& result, const fs::path& dir, const DriftReport* drift) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IngestionError("cannot create output directory " + dir.string());
  json j = run_to_json(result);
  if (drift != nullptr) {
    j["drift"] = {{"mean_norm_det", drift->mean_norm_det},
                  {"n_drifted", drift->n_drifted},
                  {"n_lt_updates", drift->n_lt_updates},
                  {"relative_drift", drift->relative_drift}};
  }
  if (!result.config.crop_dir.empty()) {
    const fs::path crop = result.config.crop_dir;
    j["crop_dir"] = crop.parent_path() == dir ? crop.filename().string() : crop.string();
  }
  {
    std::ofstream os(dir / "results.json", std::ios::trunc);
    os << j.dump(2) << "\n";
  }
  {
    std::ofstream os(dir / "trace.csv", std::ios::trunc);
    os << trace_csv(result);
  }
  double total = 0.0;
  for (const auto& f : result.frames) total += f.seconds;
  {
    std::ofstream os(dir / "timing.json", std::ios::trunc);
    os << json{{"seconds", total}, {"fps", total > 0.0 ? result.frames.size() / total : 0.0}}.dump(2) << "\n";
  }
  save_snapshot(result.final_memory, dir / "memory");
}

StoredRun load_stored_run(const fs::path& results_json) {
  std::ifstream is(results_json);
  if (!is) throw IngestionError("cannot read " + results_json.string());
  StoredRun run;
  try {
    const json j = json::parse(is);
    run.frame_count = j.at("frames").get<int>();
    for (const auto& t : j.at("memory").at("initial_slots")) {
      TemplateInfo info{t.at("id").get<std::uint64_t>(), t.at("frame_index").get<int>(),
                        box_from_json(t.at("capture_box")), std::nullopt};
      if (t.contains("crop_path")) info.crop_path = t.at("crop_path").get<std::string>();
      run.initial_slots.push_back(std::move(info));
    }
    for (const auto& e : j.at("events")) {
      MemoryEvent ev;
      ev.kind = parse_event_kind(e.at("kind").get<std::string>());
      ev.frame_index = e.at("frame").get<int>();
      ev.slot = e.at("slot").get<int>();
      ev.template_id = e.at("template_id").get<std::uint64_t>();
      ev.capture_box = box_from_json(e.at("capture_box"));
      ev.det = e.at("det").get<double>();
      if (e.contains("evicted_id")) ev.evicted_id = e.at("evicted_id").get<std::uint64_t>();
      if (e.contains("crop_path")) ev.crop_path = e.at("crop_path").get<std::string>();
      run.events.push_back(std::move(ev));
    }
    if (j.contains("crop_dir")) {
      const fs::path crop = j.at("crop_dir").get<std::string>();
      run.crop_dir = crop.is_absolute() ? crop : results_json.parent_path() / crop;
    }
  } catch (const json::exception& e) {
    throw FormatError(results_json.string() + ": " + e.what());
  }
  return run;
}

std::vector<RunResult> run_many(const std::vector<Sequence>& sequences, const ThorConfig& config, int jobs) {
  std::vector<RunResult> results(sequences.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < sequences.size(); i = next++) {
      try {
        results[i] = run_ope(sequences[i], config);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(sequences.size(), 1)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  std::sort(results.begin(), results.end(), [](const RunResult& a, const RunResult& b) { return a.sequence < b.sequence; });
  return results;
}

}  // namespace thor::bench
