#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "thor/matcher.hpp"
#include "thor/memory.hpp"

namespace thor {

// Every tunable of a tracking run.
struct ThorConfig {
  // Memory.
  int k_lt = 8;
  int k_st = 4;
  LowerBoundConfig bound{BoundMode::kDynamic, 0.8};
  GammaVariant gamma_variant = GammaVariant::kAsWritten;
  int dilation = 10;
  bool normalize_features = true;

  // Inference. use_memory = false is the plain single-template matcher.
  bool use_memory = true;
  bool use_stm = true;
  bool use_modulation = true;
  bool use_masking = true;
  double th_iou = 0.4;
  double alpha = 0.25;

  // Matcher.
  EncoderKind encoder = EncoderKind::kNcc;
  std::string features_dir;
  int stride = 4;  // NCC pooling; for precomputed features, 0 accepts meta.json's value
  int template_size = 64;
  int search_size = 160;
  double template_context = 0.25;  // template side = sqrt((w + p)(h + p)), p = template_context * (w + h)
  double context_factor = 2.5;     // search side / template side
  std::vector<double> scales{0.96, 1.0, 1.04};
  double scale_penalty = 0.97;
  double window_influence = 0.2;
  bool normalize_response = true;  // divide responses by the search-window norm
  bool subpixel = true;            // parabolic refinement of the response peak

  // Optional directory for template crop images (gallery dumps).
  std::string crop_dir;

  // Throws ConfigError on inconsistent values.
  void validate() const;
};

// Default ell for a bound mode: 0.8 dynamic/static, 0.5 ensemble, 0 for none.
double default_ell(BoundMode mode);

void to_json(nlohmann::json& j, const ThorConfig& c);
void from_json(const nlohmann::json& j, ThorConfig& c);

}  // namespace thor
