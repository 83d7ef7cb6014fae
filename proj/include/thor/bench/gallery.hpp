#pragma once

// Template galleries: the long-term memory's crops at chosen frames, laid out
// as <out>/slot_NN/frame_NNNN.png plus an index.json describing each checkpoint.

#include <filesystem>
#include <string>
#include <vector>

#include "thor/bench/runner.hpp"

namespace thor::bench {

struct GallerySlot {
  int slot = 0;
  std::uint64_t template_id = 0;
  int captured_at = 0;
  std::optional<std::string> crop_path;
};

// Long-term memory contents at `frame`, replayed from the initial slots and the
// Appended / Replaced events up to and including that frame.
std::vector<GallerySlot> memory_at(const StoredRun& run, int frame);

struct GalleryReport {
  std::vector<int> checkpoints;
  int images_written = 0;
  std::vector<std::string> warnings;  // one per missing crop
};

// Empty checkpoints mean first, middle and last frame. Frames outside the run
// are a ParameterError; missing crop files only produce warnings.
GalleryReport dump_template_gallery(const StoredRun& run, const std::filesystem::path& out_dir,
                                    std::vector<int> checkpoints = {});
GalleryReport dump_template_gallery(const RunResult& result, const std::filesystem::path& out_dir,
                                    std::vector<int> checkpoints = {});

}  // namespace thor::bench
