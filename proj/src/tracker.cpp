#include "thor/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <opencv2/imgcodecs.hpp>

#include "thor/errors.hpp"

namespace thor {

namespace fs = std::filesystem;

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kAppended: return "Appended";
    case EventKind::kReplaced: return "Replaced";
    case EventKind::kRejectedBound: return "RejectedBound";
    case EventKind::kRejectedNoGain: return "RejectedNoGain";
    case EventKind::kReinit: return "Reinit";
  }
  return "unknown";
}

std::shared_ptr<const Encoder> make_encoder(const ThorConfig& config) {
  if (config.encoder == EncoderKind::kPrecomputed) {
    return std::make_shared<PrecomputedEncoder>(config.features_dir, config.stride);
  }
  return std::make_shared<NccEncoder>(config.stride);
}

double template_side(const BoundingBox& box, double context) {
  const double p = context * (box.w + box.h);
  return std::sqrt((box.w + p) * (box.h + p));
}

namespace {

int cells(const TrackState& s, int pixels) { return pixels / s.encoder->stride(); }

void save_crop(const TrackState& state, const Frame& frame, const BoundingBox& box, Template& t) {
  if (state.config.crop_dir.empty() || frame.image.empty()) return;
  const double side = template_side(box, state.config.template_context);
  cv::Mat crop = crop_square(frame.image, box.cx(), box.cy(), side, state.config.template_size);
  cv::Mat out;
  crop.convertTo(out, CV_8U);
  std::error_code ec;
  fs::create_directories(state.config.crop_dir, ec);
  const fs::path path = fs::path(state.config.crop_dir) / ("template_" + std::to_string(t.id) + ".png");
  if (cv::imwrite(path.string(), out)) t.crop_path = path.filename().string();
}

}  // namespace

Template make_template(TrackState& state, const Frame& frame, const BoundingBox& box) {
  if (!box.valid()) throw ParameterError("template box is degenerate: " + to_string(box));
  const auto& cfg = state.config;
  Template t;
  t.id = state.next_template_id++;
  t.frame_index = frame.index;
  t.capture_box = box;
  FeatureTensor f = state.encoder->encode(frame, box.cx(), box.cy(), template_side(box, cfg.template_context),
                                          cfg.template_size);
  if (cfg.use_masking) f = apply_mask(f, state.mask);
  t.feature = cfg.normalize_features ? l2_normalize(f) : std::move(f);
  save_crop(state, frame, box, t);
  return t;
}

SearchGeometry search_geometry(const TrackState& state) {
  const auto& cfg = state.config;
  SearchGeometry g;
  g.previous_box = state.box;
  g.region_side = template_side(state.box, cfg.template_context) * cfg.context_factor;
  g.search_size = cfg.search_size;
  g.stride = state.encoder->stride();
  g.kernel_h = cells(state, cfg.template_size);
  g.kernel_w = g.kernel_h;
  g.scales = cfg.scales;
  g.scale_penalty = cfg.scale_penalty;
  g.window_influence = cfg.window_influence;
  g.subpixel = cfg.subpixel;
  return g;
}

TrackState track_init(const Frame& frame, const BoundingBox& box, const ThorConfig& config,
                      std::shared_ptr<const Encoder> encoder, const MemorySnapshot* reload) {
  config.validate();
  if (!box.valid()) throw ParameterError("track_init: degenerate box " + to_string(box));
  if (!encoder) throw ConfigError("track_init: no encoder");
  if (config.template_size % encoder->stride() != 0 || config.search_size % encoder->stride() != 0) {
    throw ConfigError("template_size and search_size must be multiples of the encoder stride");
  }
  TrackState s;
  s.config = config;
  s.encoder = std::move(encoder);
  s.box = box;
  s.frame_index = frame.index;
  s.image_width = frame.image.empty() ? 0 : frame.image.cols;
  s.image_height = frame.image.empty() ? 0 : frame.image.rows;
  const int k = cells(s, config.template_size);
  s.mask = config.use_masking ? tapered_cosine_window(k, k, config.alpha) : Grid(k, k, 1.0);

  Template base = make_template(s, frame, box);
  s.stm = ShortTermMemory(config.k_st);
  s.stm.push(base);
  if (reload != nullptr) {
    std::vector<Template> slots = reload->templates;
    if (slots.empty() || slots.front().feature.shape() != base.feature.shape()) {
      throw ConfigError("reloaded memory does not match the template geometry");
    }
    std::uint64_t max_id = 0;
    for (const auto& t : slots) max_id = std::max(max_id, t.id);
    s.next_template_id = std::max(s.next_template_id, max_id + 1);
    s.ltm = LongTermMemory::restore(std::move(slots), config.k_lt);
  } else {
    s.ltm = LongTermMemory::init(std::move(base), config.k_lt);
  }
  return s;
}

FramePrediction thor_step(TrackState& state, const Frame& frame) {
  const auto& cfg = state.config;
  const SearchGeometry geometry = search_geometry(state);
  const int search_cells = cells(state, cfg.search_size);

  // Kernel order: short-term templates, then long-term ones.
  std::vector<FeatureTensor> kernels;
  std::vector<std::uint64_t> ids;
  std::size_t n_st = 0;
  if (cfg.use_memory && cfg.use_stm) {
    for (const auto& t : state.stm.templates()) {
      kernels.push_back(t.feature);
      ids.push_back(t.id);
    }
    n_st = kernels.size();
  }
  if (cfg.use_memory) {
    for (const auto& t : state.ltm.slots()) {
      kernels.push_back(t.feature);
      ids.push_back(t.id);
    }
  } else {
    kernels.push_back(state.ltm.base().feature);
    ids.push_back(state.ltm.base().id);
  }

  std::vector<ActivationMap> st_maps;
  std::vector<ActivationMap> lt_maps;
  for (std::size_t si = 0; si < cfg.scales.size(); ++si) {
    const double side = geometry.region_side * cfg.scales[si];
    const FeatureTensor search = state.encoder->encode(frame, state.box.cx(), state.box.cy(), side, cfg.search_size);
    if (search.height() != search_cells || search.width() != search_cells) {
      throw DimensionError("encoder returned an unexpected search tensor size");
    }
    auto maps = batch_cross_correlate(kernels, search);
    if (cfg.normalize_response) {
      normalize_responses(maps, kernels, window_stats(search, kernels[0].height(), kernels[0].width()));
    }
    for (std::size_t i = 0; i < maps.size(); ++i) {
      maps[i].set_template_id(ids[i]);
      maps[i].set_scale_index(static_cast<int>(si));
    }
    std::vector<ActivationMap> st(std::make_move_iterator(maps.begin()),
                                  std::make_move_iterator(maps.begin() + static_cast<std::ptrdiff_t>(n_st)));
    std::vector<ActivationMap> lt(std::make_move_iterator(maps.begin() + static_cast<std::ptrdiff_t>(n_st)),
                                  std::make_move_iterator(maps.end()));
    if (cfg.use_modulation) {
      st = modulate(st);
      lt = modulate(lt);
    }
    for (auto& m : st) st_maps.push_back(std::move(m));
    for (auto& m : lt) lt_maps.push_back(std::move(m));
  }

  FramePrediction out;
  out.frame_index = frame.index;
  const Prediction lt_pred = best_prediction(lt_maps, geometry);
  Prediction final_pred = lt_pred;
  out.source = Source::kLongTerm;
  std::optional<Template> seed;
  if (!st_maps.empty()) {
    const Prediction st_pred = best_prediction(st_maps, geometry);
    const SwitchResult sw = st_lt_switch(st_pred, lt_pred, cfg.th_iou);
    out.source = sw.choice;
    final_pred = sw.choice == Source::kShortTerm ? st_pred : lt_pred;
    if (sw.reinit) {
      seed = make_template(state, frame, lt_pred.box);
      state.stm.reinitialize(*seed);
      out.stm_reinit = true;
      out.events.push_back({EventKind::kReinit, frame.index, 0, seed->id, 0, seed->capture_box,
                            state.ltm.current_det(), seed->crop_path});
    }
  }

  BoundingBox box = final_pred.box;
  if (state.image_width > 0 && state.image_height > 0) box = clamp_to_image(box, state.image_width, state.image_height);
  state.box = box;
  state.frame_index = frame.index;
  out.box = box;
  out.score = final_pred.score;

  if (cfg.use_memory && should_consider(frame.index, cfg.dilation)) {
    // After a reinit the seed was cut at the long-term box, which is the final box.
    Template candidate = seed ? *seed : make_template(state, frame, box);
    if (cfg.use_stm && !seed) state.stm.push(candidate);
    const double gamma = cfg.use_stm ? state.stm.diversity(cfg.gamma_variant) : 0.0;
    const Decision d = state.ltm.consider(candidate, cfg.bound, gamma);
    MemoryEvent ev{EventKind::kRejectedBound, frame.index, d.slot,  candidate.id,
                   d.evicted_id,             candidate.capture_box, d.det, candidate.crop_path};
    switch (d.kind) {
      case Decision::Kind::kAppended: ev.kind = EventKind::kAppended; break;
      case Decision::Kind::kReplaced: ev.kind = EventKind::kReplaced; break;
      case Decision::Kind::kRejectedBound: ev.kind = EventKind::kRejectedBound; break;
      case Decision::Kind::kRejectedNoGain: ev.kind = EventKind::kRejectedNoGain; break;
    }
    out.events.push_back(ev);
  }
  out.det_after = state.ltm.capacity_det();
  out.gamma_after = cfg.use_memory && cfg.use_stm ? state.stm.diversity(cfg.gamma_variant) : 0.0;
  return out;
}

}  // namespace thor
