#pragma once

// Per-frame inference over the two template sets: activation modulation,
// best-box selection and the short-term / long-term switch.

#include <span>
#include <string>
#include <vector>

#include "thor/core_space.hpp"
#include "thor/geometry.hpp"
#include "thor/matcher.hpp"

namespace thor {

// Each map is shifted by its own minimum, weighted by its shifted peak, and
// multiplied element-wise by the weighted spatial average of all maps. The
// product is rescaled to the map's shifted peak and the shift is undone, so
// every output keeps its input peak value exactly. If all weights are zero
// the maps are returned unchanged.
std::vector<ActivationMap> modulate(std::span<const ActivationMap> maps);

struct Prediction {
  BoundingBox box;
  double score = 0.0;
  std::uint64_t template_id = 0;
  int scale_index = 0;
};

// Global best peak over all maps (window blend and scale penalty applied).
// Ties resolve to the lowest template id, then the first row-major cell.
Prediction best_prediction(std::span<const ActivationMap> maps, const SearchGeometry& geometry);

enum class Source { kShortTerm, kLongTerm };

std::string to_string(Source s);

struct SwitchResult {
  Source choice = Source::kShortTerm;
  bool reinit = false;
};

// Keeps the short-term prediction unless it overlaps the long-term one by less
// than th_iou, in which case the long-term box wins and the STM is reseeded.
SwitchResult st_lt_switch(const Prediction& st, const Prediction& lt, double th_iou);

}  // namespace thor
