#include "thor/bench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "thor/errors.hpp"

namespace thor::bench {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(EventType type) {
  switch (type) {
    case EventType::kIlluminationShift: return "illumination_shift";
    case EventType::kRotation90: return "rotation_90";
    case EventType::kOcclusionBand: return "occlusion_band";
    case EventType::kTextureSwap: return "texture_swap";
  }
  return "unknown";
}

EventType parse_event_type(const std::string& s) {
  for (auto t : {EventType::kIlluminationShift, EventType::kRotation90, EventType::kOcclusionBand,
                 EventType::kTextureSwap}) {
    if (to_string(t) == s) return t;
  }
  throw ParameterError("unknown synthetic event '" + s + "'");
}

void SyntheticSpec::validate() const {
  auto fail = [this](const std::string& what) { throw ParameterError("synthetic spec '" + name + "': " + what); };
  if (name.empty()) fail("empty name");
  if (width < 16 || height < 16) fail("canvas must be at least 16x16");
  if (frames < 2) fail("need at least 2 frames");
  if (!(noise >= 0.0)) fail("pixel noise must be >= 0");
  if (w < 4 || h < 4) fail("target must be at least 4x4");
  for (const auto* t : {&texture, &background}) {
    if (!(t->contrast >= 0.0) || !(t->smoothness >= 0.0)) fail("texture contrast and smoothness must be >= 0");
  }
  const auto& tr = trajectory;
  if (tr.type != "static" && tr.type != "linear" && tr.type != "sine" && tr.type != "waypoints") {
    fail("unknown trajectory '" + tr.type + "'");
  }
  if (tr.type == "sine" && !(tr.period > 0.0)) fail("sine period must be positive");
  if (tr.type == "waypoints") {
    if (tr.points.empty()) fail("waypoint trajectory without points");
    for (std::size_t i = 1; i < tr.points.size(); ++i) {
      if (!(tr.points[i][0] > tr.points[i - 1][0])) fail("waypoint frames must increase");
    }
  }
  for (const auto& e : events) {
    if (e.frame < 0 || e.frame >= frames) fail("event frame out of range");
    if (e.duration < 0) fail("negative event duration");
    if (!(e.retain >= 0.0 && e.retain <= 1.0)) fail("texture swap retain outside [0, 1]");
    if (e.type == EventType::kIlluminationShift && e.scope != "frame" && e.scope != "target") {
      fail("illumination scope must be 'frame' or 'target'");
    }
    if (e.type == EventType::kOcclusionBand) {
      if (e.width <= 0) fail("occlusion band needs a positive width");
      if (e.anchor != "target" && e.anchor != "canvas") fail("band anchor must be 'target' or 'canvas'");
      if (e.end >= 0 && e.end <= e.frame) fail("occlusion band ends before it starts");
    }
  }
  for (const auto& d : distractors) {
    if (!(d.similarity >= -1.0 && d.similarity <= 1.0)) fail("distractor similarity outside [-1, 1]");
    if (d.w < 0 || d.h < 0) fail("negative distractor size");
    if (d.end >= 0 && d.end <= d.start) fail("distractor ends before it starts");
  }
  for (int f = 0; f < frames; ++f) {
    const BoundingBox b = synthetic_box(*this, f);
    if (b.x < 0 || b.y < 0 || b.x + b.w > width || b.y + b.h > height) {
      fail("target leaves the canvas at frame " + std::to_string(f));
    }
  }
}

namespace {

template <class T>
void get_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json texture_json(const TextureParams& t) {
  return {{"level", t.level}, {"contrast", t.contrast}, {"smoothness", t.smoothness}};
}

void texture_from(const json& j, TextureParams& t) {
  get_opt(j, "level", t.level);
  get_opt(j, "contrast", t.contrast);
  get_opt(j, "smoothness", t.smoothness);
}

}  // namespace

void to_json(json& j, const SyntheticSpec& s) {
  json events = json::array();
  for (const auto& e : s.events) {
    json ej = {{"type", to_string(e.type)}, {"frame", e.frame}, {"duration", e.duration}};
    if (e.type == EventType::kTextureSwap) ej["retain"] = e.retain;
    if (e.type == EventType::kIlluminationShift) {
      ej["amount"] = e.amount;
      ej["scope"] = e.scope;
    }
    if (e.type == EventType::kOcclusionBand) {
      ej["end"] = e.end;
      ej["width"] = e.width;
      ej["offset"] = e.offset;
      ej["anchor"] = e.anchor;
    }
    events.push_back(std::move(ej));
  }
  json distractors = json::array();
  for (const auto& d : s.distractors) {
    distractors.push_back({{"similarity", d.similarity}, {"w", d.w}, {"h", d.h}, {"x", d.x}, {"y", d.y},
                           {"vx", d.vx}, {"vy", d.vy}, {"relative", d.relative}, {"start", d.start},
                           {"end", d.end}, {"seed", d.seed}});
  }
  const auto& t = s.trajectory;
  j = {{"name", s.name},
       {"width", s.width},
       {"height", s.height},
       {"frames", s.frames},
       {"seed", s.seed},
       {"target", {{"x", s.x}, {"y", s.y}, {"w", s.w}, {"h", s.h}}},
       {"trajectory",
        {{"type", t.type}, {"vx", t.vx}, {"vy", t.vy}, {"ax", t.ax}, {"ay", t.ay}, {"period", t.period},
         {"points", t.points}}},
       {"texture", texture_json(s.texture)},
       {"background", texture_json(s.background)},
       {"noise", s.noise},
       {"events", events},
       {"distractors", distractors}};
}

void from_json(const json& j, SyntheticSpec& s) {
  try {
    get_opt(j, "name", s.name);
    get_opt(j, "width", s.width);
    get_opt(j, "height", s.height);
    get_opt(j, "frames", s.frames);
    get_opt(j, "seed", s.seed);
    if (j.contains("target")) {
      const auto& t = j.at("target");
      get_opt(t, "x", s.x);
      get_opt(t, "y", s.y);
      get_opt(t, "w", s.w);
      get_opt(t, "h", s.h);
    }
    if (j.contains("trajectory")) {
      const auto& t = j.at("trajectory");
      get_opt(t, "type", s.trajectory.type);
      get_opt(t, "vx", s.trajectory.vx);
      get_opt(t, "vy", s.trajectory.vy);
      get_opt(t, "ax", s.trajectory.ax);
      get_opt(t, "ay", s.trajectory.ay);
      get_opt(t, "period", s.trajectory.period);
      get_opt(t, "points", s.trajectory.points);
    }
    if (j.contains("texture")) texture_from(j.at("texture"), s.texture);
    if (j.contains("background")) texture_from(j.at("background"), s.background);
    get_opt(j, "noise", s.noise);
    s.events.clear();
    for (const auto& ej : j.value("events", json::array())) {
      SyntheticEvent e;
      e.type = parse_event_type(ej.at("type").get<std::string>());
      get_opt(ej, "frame", e.frame);
      get_opt(ej, "duration", e.duration);
      get_opt(ej, "end", e.end);
      get_opt(ej, "amount", e.amount);
      get_opt(ej, "retain", e.retain);
      get_opt(ej, "scope", e.scope);
      get_opt(ej, "width", e.width);
      get_opt(ej, "offset", e.offset);
      get_opt(ej, "anchor", e.anchor);
      s.events.push_back(e);
    }
    s.distractors.clear();
    for (const auto& dj : j.value("distractors", json::array())) {
      Distractor d;
      get_opt(dj, "similarity", d.similarity);
      get_opt(dj, "w", d.w);
      get_opt(dj, "h", d.h);
      get_opt(dj, "x", d.x);
      get_opt(dj, "y", d.y);
      get_opt(dj, "vx", d.vx);
      get_opt(dj, "vy", d.vy);
      get_opt(dj, "relative", d.relative);
      get_opt(dj, "start", d.start);
      get_opt(dj, "end", d.end);
      get_opt(dj, "seed", d.seed);
      s.distractors.push_back(d);
    }
  } catch (const json::exception& e) {
    throw ParameterError(std::string("synthetic spec: ") + e.what());
  }
}

BoundingBox synthetic_box(const SyntheticSpec& spec, int frame) {
  const auto& t = spec.trajectory;
  const double f = frame;
  double dx = 0.0, dy = 0.0;
  if (t.type == "linear" || t.type == "sine") {
    dx = t.vx * f;
    dy = t.vy * f;
  }
  if (t.type == "sine") {
    const double phase = 2.0 * M_PI * f / t.period;
    dx += t.ax * std::sin(phase);
    dy += t.ay * std::sin(phase);
  }
  if (t.type == "waypoints" && !t.points.empty()) {
    const auto& p = t.points;
    std::array<double, 3> a = p.front(), b = p.front();
    if (f <= p.front()[0]) {
      a = b = p.front();
    } else if (f >= p.back()[0]) {
      a = b = p.back();
    } else {
      for (std::size_t i = 1; i < p.size(); ++i) {
        if (f <= p[i][0]) {
          a = p[i - 1];
          b = p[i];
          break;
        }
      }
    }
    const double u = b[0] > a[0] ? (f - a[0]) / (b[0] - a[0]) : 0.0;
    dx = a[1] + u * (b[1] - a[1]);
    dy = a[2] + u * (b[2] - a[2]);
  }
  return {std::round(spec.x + dx), std::round(spec.y + dy), static_cast<double>(spec.w),
          static_cast<double>(spec.h)};
}

namespace {

// Standard normal field from raw mt19937_64 bits (Box-Muller), so the bytes do
// not depend on the standard library's distribution implementations.
cv::Mat noise_field(int rows, int cols, std::uint64_t seed, double smoothness) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  cv::Mat m(rows, cols, CV_64F);
  auto* p = m.ptr<double>();
  const int n = rows * cols;
  for (int i = 0; i < n; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double th = 2.0 * M_PI * uniform();
    p[i] = r * std::cos(th);
    if (i + 1 < n) p[i + 1] = r * std::sin(th);
  }
  if (smoothness > 0.0) cv::GaussianBlur(m, m, cv::Size(0, 0), smoothness, smoothness, cv::BORDER_REFLECT);
  return m;
}

// Zero mean, unit std, clipped to +-3.
cv::Mat standardize(const cv::Mat& m) {
  cv::Scalar mean, stddev;
  cv::meanStdDev(m, mean, stddev);
  cv::Mat out = (m - mean[0]) / std::max(stddev[0], 1e-12);
  cv::min(out, 3.0, out);
  cv::max(out, -3.0, out);
  return out;
}

cv::Mat fit(const cv::Mat& field, int rows, int cols) {
  if (field.rows == rows && field.cols == cols) return field;
  cv::Mat out;
  cv::resize(field, out, cv::Size(cols, rows), 0, 0, cv::INTER_LINEAR);
  return out;
}

double ramp(const SyntheticEvent& e, int frame) {
  if (frame < e.frame) return 0.0;
  if (e.duration <= 0) return 1.0;
  return std::min(1.0, static_cast<double>(frame - e.frame + 1) / e.duration);
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void paste(cv::Mat& canvas, const cv::Mat& patch, int x, int y) {
  const cv::Rect dst = cv::Rect(x, y, patch.cols, patch.rows) & cv::Rect(0, 0, canvas.cols, canvas.rows);
  if (dst.empty()) return;
  patch(cv::Rect(dst.x - x, dst.y - y, dst.width, dst.height)).copyTo(canvas(dst));
}

struct Appearance {
  std::vector<const SyntheticEvent*> changes;  // swap / rotation events in frame order
  std::vector<cv::Mat> states;                 // states[k] is the texture after change k-1
};

Appearance build_appearance(const SyntheticSpec& spec) {
  Appearance a;
  a.states.push_back(standardize(noise_field(spec.h, spec.w, mix(spec.seed, 1), spec.texture.smoothness)));
  for (const auto& e : spec.events) {
    if (e.type == EventType::kTextureSwap || e.type == EventType::kRotation90) a.changes.push_back(&e);
  }
  std::stable_sort(a.changes.begin(), a.changes.end(),
                   [](const SyntheticEvent* l, const SyntheticEvent* r) { return l->frame < r->frame; });
  for (std::size_t k = 0; k < a.changes.size(); ++k) {
    const cv::Mat& prev = a.states.back();
    cv::Mat next;
    if (a.changes[k]->type == EventType::kTextureSwap) {
      const double r = a.changes[k]->retain;
      const cv::Mat fresh = standardize(noise_field(spec.h, spec.w, mix(spec.seed, 100 + k), spec.texture.smoothness));
      next = standardize(r * prev + std::sqrt(1.0 - r * r) * fresh);
    } else {
      cv::Mat rotated;
      cv::rotate(prev, rotated, cv::ROTATE_90_CLOCKWISE);
      next = fit(rotated, spec.h, spec.w);
    }
    a.states.push_back(next);
  }
  return a;
}

cv::Mat target_field(const Appearance& a, int frame) {
  std::size_t k = 0;
  while (k < a.changes.size() && a.changes[k]->frame <= frame) ++k;
  if (k == 0) return a.states[0];
  const double u = ramp(*a.changes[k - 1], frame);
  if (u >= 1.0) return a.states[k];
  return standardize((1.0 - u) * a.states[k - 1] + u * a.states[k]);
}

}  // namespace

std::vector<cv::Mat> render_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const auto& bg = spec.background;
  const auto& tx = spec.texture;
  const cv::Mat background =
      bg.level + bg.contrast * standardize(noise_field(spec.height, spec.width, mix(spec.seed, 2), bg.smoothness));
  const Appearance appearance = build_appearance(spec);

  std::vector<cv::Mat> distractor_patches;
  for (std::size_t i = 0; i < spec.distractors.size(); ++i) {
    const auto& d = spec.distractors[i];
    const int dw = d.w > 0 ? d.w : spec.w;
    const int dh = d.h > 0 ? d.h : spec.h;
    const std::uint64_t seed = d.seed != 0 ? d.seed : mix(spec.seed, 1000 + i);
    const cv::Mat own = standardize(noise_field(dh, dw, seed, tx.smoothness));
    const cv::Mat base = fit(appearance.states[0], dh, dw);
    const double s = d.similarity;
    distractor_patches.push_back(tx.level + tx.contrast * standardize(s * base + std::sqrt(1.0 - s * s) * own));
  }

  std::vector<cv::Mat> band_fields;
  for (std::size_t i = 0; i < spec.events.size(); ++i) {
    if (spec.events[i].type != EventType::kOcclusionBand) {
      band_fields.emplace_back();
      continue;
    }
    band_fields.push_back(
        bg.level + bg.contrast * standardize(noise_field(spec.height, spec.width, mix(spec.seed, 500 + i), bg.smoothness)));
  }

  std::vector<cv::Mat> frames;
  frames.reserve(static_cast<std::size_t>(spec.frames));
  for (int f = 0; f < spec.frames; ++f) {
    cv::Mat canvas = background.clone();
    const BoundingBox box = synthetic_box(spec, f);
    for (std::size_t i = 0; i < spec.distractors.size(); ++i) {
      const auto& d = spec.distractors[i];
      if (f < d.start || (d.end >= 0 && f >= d.end)) continue;
      const double ox = d.relative ? box.x : 0.0;
      const double oy = d.relative ? box.y : 0.0;
      const double t = f - d.start;
      paste(canvas, distractor_patches[i], static_cast<int>(std::lround(ox + d.x + d.vx * t)),
            static_cast<int>(std::lround(oy + d.y + d.vy * t)));
    }

    double target_light = 0.0;
    double frame_light = 0.0;
    for (const auto& e : spec.events) {
      if (e.type != EventType::kIlluminationShift) continue;
      (e.scope == "target" ? target_light : frame_light) += e.amount * ramp(e, f);
    }
    const cv::Mat patch = tx.level + target_light + tx.contrast * target_field(appearance, f);
    paste(canvas, patch, static_cast<int>(box.x), static_cast<int>(box.y));

    for (std::size_t i = 0; i < spec.events.size(); ++i) {
      const auto& e = spec.events[i];
      if (e.type != EventType::kOcclusionBand || f < e.frame || (e.end >= 0 && f >= e.end)) continue;
      const int left = static_cast<int>(std::lround((e.anchor == "target" ? box.x : 0.0) + e.offset));
      const cv::Rect r = cv::Rect(left, 0, e.width, spec.height) & cv::Rect(0, 0, spec.width, spec.height);
      if (!r.empty()) band_fields[i](r).copyTo(canvas(r));
    }

    canvas += frame_light;
    if (spec.noise > 0.0) canvas += spec.noise * noise_field(spec.height, spec.width, mix(spec.seed, 10000 + f), 0.0);
    cv::Mat out;
    canvas.convertTo(out, CV_8U);  // rounds and saturates
    frames.push_back(out);
  }
  return frames;
}

Sequence generate_synthetic(const SyntheticSpec& spec, const fs::path& out_root) {
  const auto frames = render_synthetic(spec);
  const fs::path dir = out_root / spec.name;
  std::error_code ec;
  fs::remove_all(dir / "img", ec);
  fs::create_directories(dir / "img", ec);
  if (ec) throw IngestionError("cannot create " + (dir / "img").string());
  char name[32];
  for (std::size_t i = 0; i < frames.size(); ++i) {
    std::snprintf(name, sizeof(name), "%04zu.png", i + 1);
    if (!cv::imwrite((dir / "img" / name).string(), frames[i])) {
      throw IngestionError("cannot write " + (dir / "img" / name).string());
    }
  }
  {
    std::ofstream gt(dir / "groundtruth_rect.txt", std::ios::trunc);
    for (int f = 0; f < spec.frames; ++f) {
      const BoundingBox b = synthetic_box(spec, f);
      gt << static_cast<long>(b.x) + 1 << ',' << static_cast<long>(b.y) + 1 << ',' << static_cast<long>(b.w) << ','
         << static_cast<long>(b.h) << '\n';
    }
  }
  {
    std::ofstream js(dir / "spec.json", std::ios::trunc);
    js << json(spec).dump(2) << '\n';
  }
  return load_otb_sequence(dir);
}

}  // namespace thor::bench
