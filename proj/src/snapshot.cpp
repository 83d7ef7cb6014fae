#include "thor/snapshot.hpp"

#include <fstream>

#include "json.hpp"

#include "thor/errors.hpp"
#include "thor/feature_io.hpp"

namespace thor {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kManifestVersion = 1;

std::string slot_file(int slot) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "slot_%02d.fts", slot);
  return buf;
}

}  // namespace

MemorySnapshot snapshot_of(const LongTermMemory& mem) {
  return MemorySnapshot{mem.capacity(), mem.current_det(), mem.slots()};
}

void save_snapshot(const MemorySnapshot& snap, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IngestionError("cannot create snapshot directory " + dir.string() + ": " + ec.message());
  json manifest;
  manifest["format"] = "thor-memory";
  manifest["version"] = kManifestVersion;
  manifest["capacity"] = snap.capacity;
  manifest["normalized_determinant"] = snap.normalized_det;
  json slots = json::array();
  for (std::size_t i = 0; i < snap.templates.size(); ++i) {
    const auto& t = snap.templates[i];
    const std::string file = slot_file(static_cast<int>(i));
    write_feature_file(t.feature, dir / file);
    json entry = {{"slot", i},
                  {"id", t.id},
                  {"frame_index", t.frame_index},
                  {"capture_box", {t.capture_box.x, t.capture_box.y, t.capture_box.w, t.capture_box.h}},
                  {"file", file}};
    if (t.crop_path) entry["crop_path"] = *t.crop_path;
    slots.push_back(std::move(entry));
  }
  manifest["slots"] = std::move(slots);
  std::ofstream os(dir / "manifest.json", std::ios::trunc);
  if (!os) throw IngestionError("cannot write " + (dir / "manifest.json").string());
  os << manifest.dump(2) << "\n";
}

MemorySnapshot load_snapshot(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  std::ifstream is(manifest_path);
  if (!is) throw IngestionError("missing snapshot manifest " + manifest_path.string());
  MemorySnapshot snap;
  try {
    const json manifest = json::parse(is);
    if (manifest.at("format").get<std::string>() != "thor-memory") throw FormatError("not a memory manifest");
    snap.capacity = manifest.at("capacity").get<int>();
    snap.normalized_det = manifest.at("normalized_determinant").get<double>();
    for (const auto& entry : manifest.at("slots")) {
      Template t;
      t.id = entry.at("id").get<std::uint64_t>();
      t.frame_index = entry.at("frame_index").get<int>();
      const auto& box = entry.at("capture_box");
      t.capture_box = {box.at(0).get<double>(), box.at(1).get<double>(), box.at(2).get<double>(),
                       box.at(3).get<double>()};
      if (entry.contains("crop_path")) t.crop_path = entry.at("crop_path").get<std::string>();
      t.feature = read_feature_file(dir / entry.at("file").get<std::string>());
      snap.templates.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }
  if (snap.templates.empty()) throw FormatError(manifest_path.string() + ": snapshot has no templates");
  return snap;
}

}  // namespace thor
