#include "thor/config.hpp"

#include <algorithm>
#include <cmath>

#include "thor/errors.hpp"

namespace thor {

double default_ell(BoundMode mode) {
  switch (mode) {
    case BoundMode::kEnsemble: return 0.5;
    case BoundMode::kNone: return 0.0;
    default: return 0.8;
  }
}

void ThorConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (k_lt < 1) fail("k_lt must be >= 1");
  if (k_st < 1) fail("k_st must be >= 1");
  if (dilation < 1) fail("dilation must be >= 1");
  if (bound.mode != BoundMode::kNone && !(bound.ell > 0.0)) fail("ell must be positive");
  if (!(th_iou >= 0.0 && th_iou <= 1.0)) fail("th_iou must lie in [0, 1]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in [0, 1]");
  if (template_size < 16 || search_size < 16) fail("template_size and search_size must be >= 16");
  if (template_size >= search_size) fail("template_size must be smaller than search_size");
  if (encoder == EncoderKind::kNcc && stride < 1) fail("stride must be >= 1");
  if (stride > 0 && (template_size % stride != 0 || search_size % stride != 0)) {
    fail("template_size and search_size must be multiples of the stride");
  }
  if (!(template_context >= 0.0)) fail("template_context must be >= 0");
  if (!(context_factor > 1.0)) fail("context_factor must be > 1");
  if (std::abs(context_factor - static_cast<double>(search_size) / template_size) > 1e-9) {
    fail("context_factor must equal search_size / template_size so both crops share one pixel scale");
  }
  if (scales.empty() || std::find(scales.begin(), scales.end(), 1.0) == scales.end()) fail("scales must contain 1.0");
  if (!std::is_sorted(scales.begin(), scales.end())) fail("scales must be sorted ascending");
  for (double s : scales) {
    if (!(s > 0.0)) fail("scales must be positive");
  }
  if (!(scale_penalty > 0.0 && scale_penalty <= 1.0)) fail("scale_penalty must lie in (0, 1]");
  if (!(window_influence >= 0.0 && window_influence <= 1.0)) fail("window_influence must lie in [0, 1]");
  if (encoder == EncoderKind::kPrecomputed && features_dir.empty()) fail("precomputed encoder needs features_dir");
}

void to_json(nlohmann::json& j, const ThorConfig& c) {
  j = nlohmann::json{
      {"k_lt", c.k_lt},
      {"k_st", c.k_st},
      {"bound", to_string(c.bound.mode)},
      {"ell", c.bound.ell},
      {"gamma_variant", to_string(c.gamma_variant)},
      {"dilation", c.dilation},
      {"normalize_features", c.normalize_features},
      {"use_memory", c.use_memory},
      {"use_stm", c.use_stm},
      {"use_modulation", c.use_modulation},
      {"use_masking", c.use_masking},
      {"th_iou", c.th_iou},
      {"alpha", c.alpha},
      {"encoder", to_string(c.encoder)},
      {"features_dir", c.features_dir},
      {"stride", c.stride},
      {"template_size", c.template_size},
      {"search_size", c.search_size},
      {"template_context", c.template_context},
      {"context_factor", c.context_factor},
      {"scales", c.scales},
      {"scale_penalty", c.scale_penalty},
      {"window_influence", c.window_influence},
      {"normalize_response", c.normalize_response},
      {"subpixel", c.subpixel},
  };
}

void from_json(const nlohmann::json& j, ThorConfig& c) {
  ThorConfig d;
  c.k_lt = j.value("k_lt", d.k_lt);
  c.k_st = j.value("k_st", d.k_st);
  c.bound.mode = parse_bound_mode(j.value("bound", to_string(d.bound.mode)));
  c.bound.ell = j.value("ell", default_ell(c.bound.mode));
  c.gamma_variant = parse_gamma_variant(j.value("gamma_variant", to_string(d.gamma_variant)));
  c.dilation = j.value("dilation", d.dilation);
  c.normalize_features = j.value("normalize_features", d.normalize_features);
  c.use_memory = j.value("use_memory", d.use_memory);
  c.use_stm = j.value("use_stm", d.use_stm);
  c.use_modulation = j.value("use_modulation", d.use_modulation);
  c.use_masking = j.value("use_masking", d.use_masking);
  c.th_iou = j.value("th_iou", d.th_iou);
  c.alpha = j.value("alpha", d.alpha);
  c.encoder = parse_encoder_kind(j.value("encoder", to_string(d.encoder)));
  c.features_dir = j.value("features_dir", d.features_dir);
  c.stride = j.value("stride", d.stride);
  c.template_size = j.value("template_size", d.template_size);
  c.search_size = j.value("search_size", d.search_size);
  c.template_context = j.value("template_context", d.template_context);
  c.context_factor = j.value("context_factor", d.context_factor);
  c.scales = j.value("scales", d.scales);
  c.scale_penalty = j.value("scale_penalty", d.scale_penalty);
  c.window_influence = j.value("window_influence", d.window_influence);
  c.normalize_response = j.value("normalize_response", d.normalize_response);
  c.subpixel = j.value("subpixel", d.subpixel);
}

}  // namespace thor
