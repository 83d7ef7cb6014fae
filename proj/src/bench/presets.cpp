#include <functional>
#include <cmath>
#include <map>
#include <random>

#include "thor/bench/synthetic.hpp"
#include "thor/errors.hpp"

namespace thor::bench {

namespace {

SyntheticEvent swap(int frame, int duration, double retain = 0.0) {
  SyntheticEvent e;
  e.type = EventType::kTextureSwap;
  e.frame = frame;
  e.duration = duration;
  e.retain = retain;
  return e;
}

SyntheticEvent light(int frame, int duration, double amount, const std::string& scope) {
  SyntheticEvent e;
  e.type = EventType::kIlluminationShift;
  e.frame = frame;
  e.duration = duration;
  e.amount = amount;
  e.scope = scope;
  return e;
}

SyntheticEvent rotate(int frame, int duration) {
  SyntheticEvent e;
  e.type = EventType::kRotation90;
  e.frame = frame;
  e.duration = duration;
  return e;
}

SyntheticEvent band(int frame, int end, int width, double offset) {
  SyntheticEvent e;
  e.type = EventType::kOcclusionBand;
  e.frame = frame;
  e.end = end;
  e.width = width;
  e.offset = offset;
  return e;
}

Distractor lookalike(double similarity, double dx, double dy, int start, int end) {
  Distractor d;
  d.similarity = similarity;
  d.relative = true;
  d.x = dx;
  d.y = dy;
  d.start = start;
  d.end = end;
  return d;
}

// Static look-alike patches scattered over the canvas, placed from the spec seed.
SyntheticSpec cluttered(SyntheticSpec s, int count, double similarity) {
  std::mt19937_64 rng(s.seed * 7919 + 17);
  auto uniform = [&rng](double hi) { return std::floor(static_cast<double>(rng() >> 11) * 0x1.0p-53 * hi); };
  for (int i = 0; i < count; ++i) {
    Distractor d;
    d.similarity = similarity;
    d.x = uniform(s.width - s.w);
    d.y = uniform(s.height - s.h);
    s.distractors.push_back(d);
  }
  return s;
}

SyntheticSpec base(const std::string& name, std::uint64_t seed, int frames) {
  SyntheticSpec s;
  s.name = name;
  s.seed = seed;
  s.frames = frames;
  s.noise = 3.0;
  return s;
}

const std::map<std::string, std::function<SyntheticSpec()>>& presets() {
  static const std::map<std::string, std::function<SyntheticSpec()>> table = {
      {"static", [] { return base("static", 11, 30); }},
      {"linear",
       [] {
         auto s = base("linear", 12, 40);
         s.x = 40;
         s.trajectory.type = "linear";
         s.trajectory.vx = 5.0;
         return s;
       }},
      {"sine_swap",
       [] {
         auto s = base("sine_swap", 21, 120);
         s.x = 60;
         s.y = 90;
         s.trajectory.type = "sine";
         s.trajectory.vx = 1.2;
         s.trajectory.ay = 30;
         s.trajectory.period = 80;
         s.events = {swap(30, 40, 0.5), light(80, 10, 25, "target")};
         s.distractors = {lookalike(0.9, 50, 0, 70, 100)};
         return cluttered(s, 12, 0.7);
       }},
      {"target_light_swap",
       [] {
         auto s = base("target_light_swap", 22, 120);
         s.x = 200;
         s.y = 100;
         s.trajectory.type = "sine";
         s.trajectory.ax = 60;
         s.trajectory.ay = 20;
         s.trajectory.period = 90;
         s.events = {light(20, 10, 30, "target"), swap(40, 40, 0.5)};
         s.distractors = {lookalike(0.9, 0, 50, 80, 110)};
         return cluttered(s, 12, 0.7);
       }},
      {"diagonal_swap",
       [] {
         auto s = base("diagonal_swap", 23, 120);
         s.x = 50;
         s.y = 60;
         s.trajectory.type = "linear";
         s.trajectory.vx = 1.5;
         s.trajectory.vy = 0.6;
         s.events = {swap(30, 40, 0.5), light(80, 10, -25, "frame")};
         s.distractors = {lookalike(0.9, -50, 0, 70, 100)};
         return cluttered(s, 12, 0.7);
       }},
      {"frame_light_swap",
       [] {
         auto s = base("frame_light_swap", 24, 120);
         s.x = 140;
         s.y = 40;
         s.trajectory.type = "sine";
         s.trajectory.vy = 1.0;
         s.trajectory.ax = 50;
         s.trajectory.period = 60;
         s.events = {light(15, 20, -30, "frame"), swap(45, 40, 0.5)};
         s.distractors = {lookalike(0.9, 0, 50, 85, 115)};
         return cluttered(s, 12, 0.7);
       }},
      {"band_swap",
       [] {
         auto s = base("band_swap", 25, 120);
         s.x = 40;
         s.y = 100;
         s.trajectory.type = "linear";
         s.trajectory.vx = 2.0;
         s.events = {swap(20, 40, 0.5), band(70, 76, 12, 14)};
         s.distractors = {lookalike(0.9, 50, 0, 60, 90)};
         return cluttered(s, 12, 0.7);
       }},
      {"distractor",
       [] {
         // After a swap the first appearance lives on only in a static look-alike
         // below the path; further on the target slides behind a fixed band.
         auto s = base("distractor", 36, 120);
         s.x = 20;
         s.y = 100;
         s.trajectory.type = "linear";
         s.trajectory.vx = 2.0;
         auto wall = band(0, 120, 44, 180);
         wall.anchor = "canvas";
         s.events = {swap(5, 30, 0.5), wall};
         Distractor d;
         d.similarity = 0.7;
         d.x = 100;
         d.y = 140;  // touches the path, inside the search reach
         s.distractors = {d};
         return s;
       }},
      {"poc",
       [] {
         auto s = base("poc", 41, 200);
         s.x = 80;
         s.y = 90;
         s.trajectory.type = "sine";
         s.trajectory.vx = 0.6;
         s.trajectory.ay = 40;
         s.trajectory.period = 100;
         s.events = {swap(30, 30, 0.5), light(70, 10, 25, "target"), rotate(110, 30), swap(150, 30, 0.5)};
         return s;
       }},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, make] : presets()) names.push_back(name);
  return names;
}

SyntheticSpec synthetic_preset(const std::string& name, std::uint64_t seed) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw ParameterError("unknown synthetic preset '" + name + "'");
  SyntheticSpec s = it->second();
  if (seed != 0) s.seed = seed;
  return s;
}

std::vector<SyntheticSpec> appearance_suite(std::uint64_t seed) {
  std::vector<SyntheticSpec> out;
  std::uint64_t i = 0;
  for (const char* name : {"sine_swap", "target_light_swap", "diagonal_swap", "frame_light_swap", "band_swap"}) {
    out.push_back(synthetic_preset(name, seed == 0 ? 0 : seed + 7919 * i++));
  }
  return out;
}

}  // namespace thor::bench
