#pragma once

// Tracking loop: initialization from the first frame and the per-frame step
// that queries both memories, picks a box, and feeds it back into them.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "thor/config.hpp"
#include "thor/inference.hpp"
#include "thor/matcher.hpp"
#include "thor/memory.hpp"
#include "thor/snapshot.hpp"

namespace thor {

enum class EventKind { kAppended, kReplaced, kRejectedBound, kRejectedNoGain, kReinit };

std::string to_string(EventKind kind);

struct MemoryEvent {
  EventKind kind = EventKind::kAppended;
  int frame_index = 0;
  int slot = -1;
  std::uint64_t template_id = 0;
  std::uint64_t evicted_id = 0;
  BoundingBox capture_box;
  double det = 0.0;  // normalized LTM determinant after the event
  std::optional<std::string> crop_path;
};

struct FramePrediction {
  int frame_index = 0;
  BoundingBox box;
  double score = 0.0;
  Source source = Source::kShortTerm;
  bool stm_reinit = false;
  double det_after = 0.0;  // LongTermMemory::capacity_det after the step
  double gamma_after = 0.0;
  std::vector<MemoryEvent> events;
};

struct TrackState {
  ThorConfig config;
  std::shared_ptr<const Encoder> encoder;
  BoundingBox box;
  LongTermMemory ltm;
  ShortTermMemory stm{1};
  int frame_index = 0;
  std::uint64_t next_template_id = 0;
  int image_width = 0;
  int image_height = 0;
  Grid mask;
};

// Builds the encoder a config asks for.
std::shared_ptr<const Encoder> make_encoder(const ThorConfig& config);

// Side of the square template region for a box.
double template_side(const BoundingBox& box, double context);

// Crop -> encode -> mask -> normalize at `box` in `frame`.
Template make_template(TrackState& state, const Frame& frame, const BoundingBox& box);

// Initializes both memories with the base template built from `box`. With a
// snapshot, the long-term memory is restored from it instead (its slot 0 is the
// base template of the same sequence).
TrackState track_init(const Frame& frame, const BoundingBox& box, const ThorConfig& config,
                      std::shared_ptr<const Encoder> encoder, const MemorySnapshot* reload = nullptr);

// One tracking step on the next frame.
FramePrediction thor_step(TrackState& state, const Frame& frame);

// Geometry of the search around the state's current box.
SearchGeometry search_geometry(const TrackState& state);

}  // namespace thor
