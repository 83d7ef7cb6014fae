#pragma once

// Memory snapshots on disk: one FTS1 file per template plus manifest.json
// listing slot order, ids, frame indices, capture boxes and the stored
// normalized determinant.

#include <filesystem>
#include <vector>

#include "thor/memory.hpp"

namespace thor {

struct MemorySnapshot {
  int capacity = 0;
  double normalized_det = 0.0;
  std::vector<Template> templates;  // slot order; slot 0 is the base
};

MemorySnapshot snapshot_of(const LongTermMemory& mem);

void save_snapshot(const MemorySnapshot& snap, const std::filesystem::path& dir);
MemorySnapshot load_snapshot(const std::filesystem::path& dir);

}  // namespace thor
