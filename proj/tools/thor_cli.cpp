// Command-line front end: track, bench, poc, ablate, synth, gallery.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "thor/bench/gallery.hpp"
#include "thor/bench/metrics.hpp"
#include "thor/bench/poc.hpp"
#include "thor/bench/runner.hpp"
#include "thor/bench/synthetic.hpp"
#include "thor/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace thor;
using namespace thor::bench;

namespace {

struct Options {
  std::string dataset;
  std::string sequence;
  std::string bound;
  std::optional<double> ell;
  std::optional<int> k_lt, k_st, dilation;
  std::optional<double> th_iou, alpha;
  std::string encoder;
  std::string features_dir;
  std::uint64_t seed = 0;
  std::string out = "thor_out";
  std::string config_file;
  std::string gamma;
  int jobs = 1;
  bool no_modulation = false;
  bool no_masking = false;
  bool no_stm = false;
  bool vanilla = false;
  bool crops = false;
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("--dataset", o.dataset, "Dataset root: <root>/<sequence>/img + groundtruth_rect.txt");
  app->add_option("--sequence", o.sequence, "Sequence name under --dataset, or a sequence directory");
  app->add_option("--bound", o.bound, "Lower bound mode")
      ->check(CLI::IsMember({"static", "dynamic", "ensemble", "none"}));
  app->add_option("--ell", o.ell, "Lower bound threshold");
  app->add_option("--k-lt", o.k_lt, "Long-term memory capacity");
  app->add_option("--k-st", o.k_st, "Short-term memory capacity");
  app->add_option("--th-iou", o.th_iou, "IoU threshold of the ST-LT switch");
  app->add_option("--alpha", o.alpha, "Tukey window taper");
  app->add_option("--dilation", o.dilation, "Frames between memory updates");
  app->add_option("--encoder", o.encoder, "Feature encoder")->check(CLI::IsMember({"ncc", "precomputed"}));
  app->add_option("--features-dir", o.features_dir, "Directory with precomputed FTS1 features");
  app->add_option("--seed", o.seed, "Seed recorded with the run (and used by synth)");
  app->add_option("--out", o.out, "Output directory");
  app->add_option("--config", o.config_file, "JSON config to start from");
  app->add_option("--gamma", o.gamma, "Diversity formula")->check(CLI::IsMember({"as_written", "pair_normalized"}));
  app->add_option("--jobs", o.jobs, "Sequences evaluated concurrently")->check(CLI::PositiveNumber);
  app->add_flag("--no-modulation", o.no_modulation, "Use raw activation maps");
  app->add_flag("--no-masking", o.no_masking, "Use an all-ones window instead of the taper");
  app->add_flag("--no-stm", o.no_stm, "Long-term memory only");
  app->add_flag("--vanilla", o.vanilla, "Single base template, no memory");
}

ThorConfig make_config(const Options& o) {
  ThorConfig c;
  if (!o.config_file.empty()) {
    std::ifstream is(o.config_file);
    if (!is) throw ConfigError("cannot read " + o.config_file);
    try {
      c = json::parse(is).get<ThorConfig>();
    } catch (const json::exception& e) {
      throw ConfigError(o.config_file + ": " + e.what());
    }
  }
  if (!o.bound.empty()) {
    c.bound.mode = parse_bound_mode(o.bound);
    c.bound.ell = default_ell(c.bound.mode);
  }
  if (o.ell) c.bound.ell = *o.ell;
  if (o.k_lt) c.k_lt = *o.k_lt;
  if (o.k_st) c.k_st = *o.k_st;
  if (o.th_iou) c.th_iou = *o.th_iou;
  if (o.alpha) c.alpha = *o.alpha;
  if (o.dilation) c.dilation = *o.dilation;
  if (!o.gamma.empty()) c.gamma_variant = parse_gamma_variant(o.gamma);
  if (!o.encoder.empty()) c.encoder = parse_encoder_kind(o.encoder);
  if (!o.features_dir.empty()) c.features_dir = o.features_dir;
  if (o.no_modulation) c.use_modulation = false;
  if (o.no_masking) c.use_masking = false;
  if (o.no_stm) c.use_stm = false;
  if (o.vanilla) c.use_memory = false;
  c.validate();
  return c;
}

fs::path sequence_dir(const Options& o) {
  if (o.sequence.empty()) throw ParameterError("--sequence is required");
  if (fs::is_directory(fs::path(o.sequence) / "img")) return o.sequence;
  if (o.dataset.empty()) throw IngestionError("no sequence directory at '" + o.sequence + "' and no --dataset");
  return fs::path(o.dataset) / o.sequence;
}

std::vector<Sequence> dataset_sequences(const Options& o) {
  if (o.dataset.empty()) {
    if (!o.sequence.empty()) return {load_otb_sequence(sequence_dir(o))};
    throw ParameterError("--dataset is required");
  }
  std::vector<Sequence> seqs;
  if (!o.sequence.empty()) {
    seqs.push_back(load_otb_sequence(sequence_dir(o)));
    return seqs;
  }
  for (const auto& dir : list_sequences(o.dataset)) seqs.push_back(load_otb_sequence(dir));
  if (seqs.empty()) throw IngestionError("no sequences under " + o.dataset);
  return seqs;
}

void write_json(const fs::path& path, const json& j) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IngestionError("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

json drift_json(const DriftReport& d) {
  return {{"mean_norm_det", d.mean_norm_det},
          {"n_drifted", d.n_drifted},
          {"n_lt_updates", d.n_lt_updates},
          {"relative_drift", d.relative_drift}};
}

// Runs every sequence, writes per-sequence outputs under `dir`, and returns the summary.
json evaluate(const std::vector<Sequence>& seqs, const ThorConfig& config, int jobs, const fs::path& dir) {
  const auto results = run_many(seqs, config, jobs);
  json per = json::array();
  std::vector<DriftReport> drifts;
  double auc = 0.0, prec = 0.0;
  for (const auto& r : results) {
    const auto& seq = *std::find_if(seqs.begin(), seqs.end(), [&](const Sequence& s) { return s.name == r.sequence; });
    const DriftReport d = drift_stats(r, seq);
    drifts.push_back(d);
    write_run_outputs(r, dir / r.sequence, &d);
    auc += r.metrics.auc;
    prec += r.metrics.precision;
    per.push_back({{"sequence", r.sequence},
                   {"auc", r.metrics.auc},
                   {"precision_20px", r.metrics.precision},
                   {"mean_iou", r.metrics.mean_iou},
                   {"success_50", r.metrics.success_50},
                   {"final_normalized_det", r.final_det()},
                   {"failures", r.failures.size()},
                   {"drift", drift_json(d)}});
  }
  const double n = static_cast<double>(results.size());
  return {{"config", config},
          {"sequences", per},
          {"aggregate",
           {{"mean_auc", auc / n}, {"mean_precision_20px", prec / n}, {"drift", drift_json(aggregate_drift(drifts))}}},
          {"note", "VOT-style metrics (EAO, accuracy, reset-based robustness) are not computed; only one-pass "
                   "evaluation is supported."}};
}

int cmd_track(const Options& o) {
  ThorConfig cfg = make_config(o);
  const Sequence seq = load_otb_sequence(sequence_dir(o));
  const fs::path out = o.out;
  if (o.crops) cfg.crop_dir = (out / "crops").string();
  RunResult r = run_ope(seq, cfg);
  const DriftReport d = drift_stats(r, seq);
  write_run_outputs(r, out, &d);
  std::printf("%s: AUC %.4f precision %.4f det %.6g failures %zu -> %s\n", r.sequence.c_str(), r.metrics.auc,
              r.metrics.precision, r.final_det(), r.failures.size(), out.string().c_str());
  return 0;
}

int cmd_bench(const Options& o) {
  const ThorConfig cfg = make_config(o);
  const auto seqs = dataset_sequences(o);
  const json summary = evaluate(seqs, cfg, o.jobs, o.out);
  write_json(fs::path(o.out) / "results.json", summary);
  for (const auto& s : summary["sequences"]) {
    std::printf("%-24s AUC %.4f  P@20 %.4f\n", s["sequence"].get<std::string>().c_str(), s["auc"].get<double>(),
                s["precision_20px"].get<double>());
  }
  std::printf("%-24s AUC %.4f  P@20 %.4f\n", "mean", summary["aggregate"]["mean_auc"].get<double>(),
              summary["aggregate"]["mean_precision_20px"].get<double>());
  return 0;
}

int cmd_ablate(const Options& o) {
  const auto seqs = dataset_sequences(o);
  std::vector<std::pair<std::string, Options>> variants;
  if (o.no_modulation || o.no_masking || o.no_stm || o.vanilla) {
    std::string label;
    for (auto [flag, name] : {std::pair{o.no_modulation, "no_modulation"}, std::pair{o.no_masking, "no_masking"},
                              std::pair{o.no_stm, "no_stm"}, std::pair{o.vanilla, "vanilla"}}) {
      if (flag) label += (label.empty() ? "" : "+") + std::string(name);
    }
    variants.emplace_back(label, o);
  } else {
    Options v = o;
    variants.emplace_back("full", v);
    v.no_modulation = true;
    variants.emplace_back("no_modulation", v);
    v = o;
    v.no_masking = true;
    variants.emplace_back("no_masking", v);
    v = o;
    v.no_stm = true;
    variants.emplace_back("no_stm", v);
    v = o;
    v.vanilla = true;
    variants.emplace_back("vanilla", v);
  }
  json table = json::object();
  for (const auto& [label, vo] : variants) {
    const json summary = evaluate(seqs, make_config(vo), o.jobs, fs::path(o.out) / label);
    write_json(fs::path(o.out) / label / "results.json", summary);
    table[label] = {{"mean_auc", summary["aggregate"]["mean_auc"]},
                    {"mean_precision_20px", summary["aggregate"]["mean_precision_20px"]},
                    {"relative_drift", summary["aggregate"]["drift"]["relative_drift"]}};
    json per = json::object();
    for (const auto& s : summary["sequences"]) per[s["sequence"].get<std::string>()] = s["auc"];
    table[label]["auc"] = per;
    std::printf("%-16s mean AUC %.4f  P@20 %.4f  drift %.4f\n", label.c_str(),
                summary["aggregate"]["mean_auc"].get<double>(),
                summary["aggregate"]["mean_precision_20px"].get<double>(),
                summary["aggregate"]["drift"]["relative_drift"].get<double>());
  }
  write_json(fs::path(o.out) / "ablation.json", table);
  return 0;
}

int cmd_poc(const Options& o, int runs) {
  ThorConfig cfg = make_config(o);
  const Sequence seq = load_otb_sequence(sequence_dir(o));
  const fs::path out = o.out;
  const auto records = poc_experiment(seq, cfg, runs, out / "runs");
  json rows = json::array();
  std::ofstream csv(out / "poc.csv", std::ios::trunc);
  csv << "run,norm_det,auc,replaced\n";
  for (const auto& r : records) {
    rows.push_back({{"run", r.run}, {"norm_det", r.norm_det}, {"auc", r.auc}, {"replaced", r.replaced}});
    char line[128];
    std::snprintf(line, sizeof(line), "%d,%.10g,%.6f,%d\n", r.run, r.norm_det, r.auc, r.replaced);
    csv << line;
    std::printf("R%d  |G_norm| %.6g  AUC %.4f  replaced %d\n", r.run, r.norm_det, r.auc, r.replaced);
  }
  const bool converged = records.size() >= 2 &&
                         relative_change(records[records.size() - 2].norm_det, records.back().norm_det) < kPocTolerance;
  write_json(out / "poc.json", {{"sequence", seq.name}, {"config", cfg}, {"runs", rows}, {"converged", converged}});
  return 0;
}

int cmd_synth(const Options& o, const std::string& preset, const std::string& spec_file, bool suite) {
  std::vector<SyntheticSpec> specs;
  if (suite) specs = appearance_suite(o.seed);
  if (!preset.empty()) specs.push_back(synthetic_preset(preset, o.seed));
  if (!spec_file.empty()) {
    std::ifstream is(spec_file);
    if (!is) throw IngestionError("cannot read " + spec_file);
    SyntheticSpec s;
    try {
      s = json::parse(is).get<SyntheticSpec>();
    } catch (const json::exception& e) {
      throw ParameterError(spec_file + ": " + e.what());
    }
    if (o.seed != 0) s.seed = o.seed;
    specs.push_back(s);
  }
  if (specs.empty()) throw ParameterError("synth needs --preset, --spec or --suite");
  for (const auto& s : specs) {
    const Sequence seq = generate_synthetic(s, o.out);
    std::printf("%s: %d frames -> %s\n", seq.name.c_str(), seq.size(), (fs::path(o.out) / s.name).string().c_str());
  }
  return 0;
}

int cmd_gallery(const Options& o, const std::string& results, const std::vector<int>& checkpoints) {
  const StoredRun run = load_stored_run(results);
  const GalleryReport rep = dump_template_gallery(run, o.out, checkpoints);
  for (const auto& w : rep.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("%d images at %zu checkpoints -> %s\n", rep.images_written, rep.checkpoints.size(), o.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Template memory tracker: tracking, benchmarks and experiments"};
  app.require_subcommand(1);
  Options o;
  int runs = 5;
  std::string preset, spec_file, results;
  bool suite = false;
  std::vector<int> checkpoints;

  auto* track = app.add_subcommand("track", "Track one sequence (one-pass)");
  add_common(track, o);
  track->add_flag("--crops", o.crops, "Save template crops for galleries");
  auto* bench = app.add_subcommand("bench", "Evaluate every sequence of a dataset");
  add_common(bench, o);
  auto* poc = app.add_subcommand("poc", "Re-run a sequence from its saved memory until the determinant converges");
  add_common(poc, o);
  poc->add_option("--runs", runs, "Maximum number of runs")->check(CLI::Range(2, 1000));
  auto* ablate = app.add_subcommand("ablate", "Compare the full tracker with components disabled");
  add_common(ablate, o);
  auto* synth = app.add_subcommand("synth", "Write synthetic sequences");
  add_common(synth, o);
  synth->add_option("--preset", preset, "Named synthetic sequence")->check(CLI::IsMember(preset_names()));
  synth->add_option("--spec", spec_file, "JSON sequence spec");
  synth->add_flag("--suite", suite, "The appearance-change suite");
  auto* gallery = app.add_subcommand("gallery", "Dump long-term memory crops at checkpoints");
  add_common(gallery, o);
  gallery->add_option("--results", results, "results.json of a run tracked with --crops")->required();
  gallery->add_option("--checkpoints", checkpoints, "Frames to dump (default: first, middle, last)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*track) return cmd_track(o);
    if (*bench) return cmd_bench(o);
    if (*poc) return cmd_poc(o, runs);
    if (*ablate) return cmd_ablate(o);
    if (*synth) return cmd_synth(o, preset, spec_file, suite);
    if (*gallery) return cmd_gallery(o, results, checkpoints);
  } catch (const thor::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
