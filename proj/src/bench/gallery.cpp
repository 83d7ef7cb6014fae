#include "thor/bench/gallery.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "thor/errors.hpp"

namespace thor::bench {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<GallerySlot> memory_at(const StoredRun& run, int frame) {
  std::vector<GallerySlot> slots;
  for (std::size_t i = 0; i < run.initial_slots.size(); ++i) {
    const auto& t = run.initial_slots[i];
    slots.push_back({static_cast<int>(i), t.id, t.frame_index, t.crop_path});
  }
  for (const auto& e : run.events) {
    if (e.frame_index > frame) break;
    if (e.kind == EventKind::kAppended) {
      slots.push_back({static_cast<int>(slots.size()), e.template_id, e.frame_index, e.crop_path});
    } else if (e.kind == EventKind::kReplaced) {
      if (e.slot < 0 || e.slot >= static_cast<int>(slots.size())) {
        throw FormatError("replacement event names slot " + std::to_string(e.slot) + " outside the memory");
      }
      slots[static_cast<std::size_t>(e.slot)] = {e.slot, e.template_id, e.frame_index, e.crop_path};
    }
  }
  return slots;
}

GalleryReport dump_template_gallery(const StoredRun& run, const fs::path& out_dir, std::vector<int> checkpoints) {
  if (run.frame_count < 1) throw ParameterError("gallery: run has no frames");
  if (checkpoints.empty()) checkpoints = {0, (run.frame_count - 1) / 2, run.frame_count - 1};
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  for (int c : checkpoints) {
    if (c < 0 || c >= run.frame_count) throw ParameterError("gallery checkpoint " + std::to_string(c) + " outside the run");
  }

  GalleryReport report;
  report.checkpoints = checkpoints;
  fs::create_directories(out_dir);
  json index = json::array();
  char name[32];
  for (int c : checkpoints) {
    json entry = {{"frame", c}, {"slots", json::array()}};
    for (const auto& s : memory_at(run, c)) {
      json sj = {{"slot", s.slot}, {"template_id", s.template_id}, {"captured_at", s.captured_at}};
      std::snprintf(name, sizeof(name), "slot_%02d", s.slot);
      const fs::path slot_dir = out_dir / name;
      std::snprintf(name, sizeof(name), "frame_%04d.png", c);
      const fs::path dst = slot_dir / name;
      const fs::path src = s.crop_path ? run.crop_dir / *s.crop_path : fs::path();
      std::error_code ec;
      if (s.crop_path && fs::is_regular_file(src, ec)) {
        fs::create_directories(slot_dir, ec);
        fs::copy_file(src, dst, fs::copy_options::overwrite_existing, ec);
      } else {
        ec = std::make_error_code(std::errc::no_such_file_or_directory);
      }
      if (ec) {
        report.warnings.push_back("frame " + std::to_string(c) + " slot " + std::to_string(s.slot) + ": crop for template " +
                                  std::to_string(s.template_id) + " unavailable" +
                                  (s.crop_path ? " (" + src.string() + ")" : ""));
        sj["image"] = nullptr;
      } else {
        ++report.images_written;
        sj["image"] = fs::relative(dst, out_dir).generic_string();
      }
      entry["slots"].push_back(std::move(sj));
    }
    index.push_back(std::move(entry));
  }
  std::ofstream os(out_dir / "index.json", std::ios::trunc);
  os << json{{"checkpoints", index}, {"warnings", report.warnings}}.dump(2) << '\n';
  return report;
}

GalleryReport dump_template_gallery(const RunResult& result, const fs::path& out_dir, std::vector<int> checkpoints) {
  StoredRun run;
  run.frame_count = static_cast<int>(result.frames.size());
  run.initial_slots = result.initial_slots;
  run.events = result.events;
  run.crop_dir = result.config.crop_dir;
  return dump_template_gallery(run, out_dir, std::move(checkpoints));
}

}  // namespace thor::bench
