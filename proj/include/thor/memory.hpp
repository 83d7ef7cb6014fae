#pragma once

// Long-term memory (diversity-maximizing, bounded by a similarity floor to the
// base template) and short-term memory (FIFO with a diversity measure).
//
// Memories are single-writer. Mutating calls must be serialized by the caller;
// const accessors are safe to call concurrently with each other but not with a
// concurrent mutation.

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thor/feature_tensor.hpp"
#include "thor/geometry.hpp"
#include "thor/gram.hpp"

namespace thor {

struct Template {
  std::uint64_t id = 0;
  int frame_index = 0;
  FeatureTensor feature;  // masked and (by default) unit-normalized
  BoundingBox capture_box;
  std::optional<std::string> crop_path;
};

enum class BoundMode { kStatic, kDynamic, kEnsemble, kNone };

std::string to_string(BoundMode mode);
BoundMode parse_bound_mode(const std::string& name);

struct LowerBoundConfig {
  BoundMode mode = BoundMode::kDynamic;
  double ell = 0.8;
};

// Relative improvement a replacement must exceed.
inline constexpr double kGainEpsilon = 1e-6;

struct Decision {
  enum class Kind { kRejectedBound, kRejectedNoGain, kAppended, kReplaced };
  Kind kind = Kind::kRejectedBound;
  int slot = -1;          // slot written on kAppended / kReplaced
  double det = 0.0;       // normalized determinant after the call
  std::uint64_t evicted_id = 0;  // previous occupant on kReplaced

  bool accepted() const { return kind == Kind::kAppended || kind == Kind::kReplaced; }
};

std::string to_string(Decision::Kind kind);

class LongTermMemory {
 public:
  // Memory holding only the base template. Throws ParameterError for capacity < 1
  // and DegenerateInputError for a zero base feature.
  static LongTermMemory init(Template base, int capacity);
  // Memory rebuilt from stored slots (slot 0 is the base).
  static LongTermMemory restore(std::vector<Template> slots, int capacity);

  // Allocation step: bound check, fill-before-replace, then the best single-slot
  // substitution if it raises the determinant by more than kGainEpsilon.
  Decision consider(const Template& candidate, const LowerBoundConfig& bound, double gamma);

  // Similarities of `feature` to every stored slot.
  std::vector<double> similarities(const FeatureTensor& feature) const;
  bool passes_bound(std::span<const double> similarities, const LowerBoundConfig& bound, double gamma) const;

  int capacity() const { return capacity_; }
  int size() const { return static_cast<int>(slots_.size()); }
  bool full() const { return size() >= capacity_; }
  const std::vector<Template>& slots() const { return slots_; }
  const Template& base() const { return slots_.front(); }
  const GramMatrix& gram() const { return gram_; }
  // Normalized determinant of the stored slots.
  double current_det() const { return current_det_; }
  // Normalized K_lt-slot volume: current_det once every slot is allocated, 0
  // while any slot is still empty. Never decreases during a run.
  double capacity_det() const { return full() ? current_det_ : 0.0; }
  std::vector<FeatureTensor> features() const;

  LongTermMemory() = default;  // empty; use init() or restore()

 private:
  int capacity_ = 0;
  std::vector<Template> slots_;
  GramMatrix gram_;
  double current_det_ = 0.0;
};

bool lower_bound_check(const LongTermMemory& mem, const Template& candidate, const LowerBoundConfig& bound,
                       double gamma);

enum class GammaVariant { kAsWritten, kPairNormalized };

std::string to_string(GammaVariant v);
GammaVariant parse_gamma_variant(const std::string& name);

class ShortTermMemory {
 public:
  explicit ShortTermMemory(int capacity);

  // FIFO insert; evicts the oldest template once capacity is exceeded.
  void push(Template t);
  // Clears the queue and inserts `seed`.
  void reinitialize(Template seed);

  // gamma = 1 - 2 / (N (N + 1) G_max) * sum_{i<j} G_ij, clamped to [0, 1];
  // the pair-normalized variant uses N (N - 1). Zero when N < 2 or G_max <= 0.
  double diversity(GammaVariant variant = GammaVariant::kAsWritten) const;

  int capacity() const { return capacity_; }
  int size() const { return static_cast<int>(queue_.size()); }
  const std::deque<Template>& templates() const { return queue_; }
  const GramMatrix& gram() const { return gram_; }

 private:
  void rebuild_gram();

  int capacity_;
  std::deque<Template> queue_;
  GramMatrix gram_;
};

// Diversity measure over an arbitrary Gram matrix.
double gram_diversity(const GramMatrix& g, GammaVariant variant);

// True iff frame_index is a multiple of dilation. Throws ParameterError for dilation < 1.
bool should_consider(int frame_index, int dilation);

}  // namespace thor
