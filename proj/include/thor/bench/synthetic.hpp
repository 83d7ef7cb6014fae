#pragma once

// Deterministic synthetic sequences with exact annotations. A textured target
// moves over a textured background; timed events change its appearance, cover
// it, or brighten the scene, and optional distractors carry a texture that is
// partially correlated with the target's.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "json.hpp"
#include "thor/bench/sequence.hpp"

namespace thor::bench {

enum class EventType { kIlluminationShift, kRotation90, kOcclusionBand, kTextureSwap };

std::string to_string(EventType type);
EventType parse_event_type(const std::string& s);

struct SyntheticEvent {
  EventType type = EventType::kTextureSwap;
  int frame = 0;
  // Frames over which the change ramps in (appearance and illumination events).
  int duration = 0;
  // First frame after an occlusion band; -1 means until the end.
  int end = -1;
  // Illumination: added intensity.
  double amount = 0.0;
  // Texture swap: correlation kept between the old and the new texture.
  double retain = 0.0;
  // Illumination: "frame" or "target".
  std::string scope = "frame";
  // Occlusion band: width in pixels and horizontal placement. With anchor
  // "target" the band's left edge sits at target.x + offset every frame;
  // with anchor "canvas" it sits at x = offset.
  int width = 0;
  double offset = 0.0;
  std::string anchor = "target";
};

struct Trajectory {
  // "static", "linear", "sine" or "waypoints".
  std::string type = "static";
  double vx = 0.0, vy = 0.0;              // linear drift, px per frame (also added to sine)
  double ax = 0.0, ay = 0.0;              // sine amplitude, px
  double period = 50.0;                   // sine period, frames
  std::vector<std::array<double, 3>> points;  // waypoints: (frame, x, y), linear in between
};

struct Distractor {
  double similarity = 0.8;  // correlation of its texture with the target's initial texture
  int w = 0, h = 0;         // 0 means the target size
  double x = 0.0, y = 0.0;  // top-left at `start`
  double vx = 0.0, vy = 0.0;
  bool relative = false;    // x, y are an offset from the target's top-left
  int start = 0;
  int end = -1;
  std::uint64_t seed = 0;   // 0 derives one from the sequence seed
};

struct TextureParams {
  double level = 128.0;
  double contrast = 30.0;    // std of the intensity field before clipping at +-3 sigma
  double smoothness = 1.5;   // Gaussian blur sigma applied to white noise, px
};

struct SyntheticSpec {
  std::string name = "synthetic";
  int width = 320;
  int height = 240;
  int frames = 50;
  std::uint64_t seed = 1;
  // Target top-left and size at frame 0.
  double x = 100.0, y = 80.0;
  int w = 40, h = 40;
  Trajectory trajectory;
  TextureParams texture{128.0, 40.0, 3.5};
  TextureParams background{128.0, 25.0, 3.5};
  // Per-frame pixel noise std.
  double noise = 0.0;
  std::vector<SyntheticEvent> events;
  std::vector<Distractor> distractors;

  // Throws ParameterError on an invalid spec.
  void validate() const;
};

void to_json(nlohmann::json& j, const SyntheticSpec& s);
void from_json(const nlohmann::json& j, SyntheticSpec& s);

// Ground-truth box of the target at a frame (integer pixel positions).
BoundingBox synthetic_box(const SyntheticSpec& spec, int frame);

// Renders frames in memory (8-bit grayscale).
std::vector<cv::Mat> render_synthetic(const SyntheticSpec& spec);

// Named specs used by the tests and the CLI. `seed` replaces the preset's seed
// when nonzero.
std::vector<std::string> preset_names();
SyntheticSpec synthetic_preset(const std::string& name, std::uint64_t seed = 0);

// The appearance-change suite used for the robustness and ablation checks.
std::vector<SyntheticSpec> appearance_suite(std::uint64_t seed = 0);

// Writes <out_root>/<name>/img/0001.png ... and groundtruth_rect.txt (1-based)
// plus spec.json, then loads the directory back as a Sequence.
Sequence generate_synthetic(const SyntheticSpec& spec, const std::filesystem::path& out_root);

}  // namespace thor::bench
