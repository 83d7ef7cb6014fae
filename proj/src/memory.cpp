#include "thor/memory.hpp"

#include <algorithm>
#include <string>

#include "thor/core_space.hpp"
#include "thor/errors.hpp"

namespace thor {

std::string to_string(BoundMode mode) {
  switch (mode) {
    case BoundMode::kStatic: return "static";
    case BoundMode::kDynamic: return "dynamic";
    case BoundMode::kEnsemble: return "ensemble";
    case BoundMode::kNone: return "none";
  }
  return "unknown";
}

BoundMode parse_bound_mode(const std::string& name) {
  if (name == "static") return BoundMode::kStatic;
  if (name == "dynamic") return BoundMode::kDynamic;
  if (name == "ensemble") return BoundMode::kEnsemble;
  if (name == "none") return BoundMode::kNone;
  throw ParameterError("unknown lower bound mode '" + name + "'");
}

std::string to_string(Decision::Kind kind) {
  switch (kind) {
    case Decision::Kind::kRejectedBound: return "RejectedBound";
    case Decision::Kind::kRejectedNoGain: return "RejectedNoGain";
    case Decision::Kind::kAppended: return "Appended";
    case Decision::Kind::kReplaced: return "Replaced";
  }
  return "unknown";
}

std::string to_string(GammaVariant v) { return v == GammaVariant::kAsWritten ? "as_written" : "pair_normalized"; }

GammaVariant parse_gamma_variant(const std::string& name) {
  if (name == "as_written") return GammaVariant::kAsWritten;
  if (name == "pair_normalized") return GammaVariant::kPairNormalized;
  throw ParameterError("unknown gamma variant '" + name + "'");
}

LongTermMemory LongTermMemory::init(Template base, int capacity) {
  std::vector<Template> slots;
  slots.push_back(std::move(base));
  return restore(std::move(slots), capacity);
}

LongTermMemory LongTermMemory::restore(std::vector<Template> slots, int capacity) {
  if (capacity < 1) throw ParameterError("long-term memory capacity must be >= 1");
  if (slots.empty()) throw ParameterError("long-term memory needs a base template");
  if (static_cast<int>(slots.size()) > capacity) throw ParameterError("more stored templates than memory slots");
  if (!(slots.front().feature.squared_norm() > 0.0)) {
    throw DegenerateInputError("base template feature is zero");
  }
  for (const auto& t : slots) {
    if (t.feature.shape() != slots.front().feature.shape()) throw DimensionError("stored templates differ in shape");
  }
  LongTermMemory mem;
  mem.capacity_ = capacity;
  mem.slots_ = std::move(slots);
  const auto feats = mem.features();
  mem.gram_ = build_gram(feats);
  mem.current_det_ = normalized_determinant(mem.gram_);
  return mem;
}

std::vector<FeatureTensor> LongTermMemory::features() const {
  std::vector<FeatureTensor> out;
  out.reserve(slots_.size());
  for (const auto& t : slots_) out.push_back(t.feature);
  return out;
}

std::vector<double> LongTermMemory::similarities(const FeatureTensor& feature) const {
  std::vector<double> row(slots_.size());
  for (std::size_t i = 0; i < slots_.size(); ++i) row[i] = inner_product(feature, slots_[i].feature);
  return row;
}

bool LongTermMemory::passes_bound(std::span<const double> sims, const LowerBoundConfig& bound, double gamma) const {
  switch (bound.mode) {
    case BoundMode::kNone:
      return true;
    case BoundMode::kStatic:
      return sims[0] > bound.ell * gram_.at(0, 0);
    case BoundMode::kDynamic:
      return sims[0] > bound.ell * gram_.at(0, 0) - gamma;
    case BoundMode::kEnsemble:
      for (std::size_t i = 0; i < slots_.size(); ++i) {
        if (!(sims[i] > bound.ell * gram_.at(static_cast<int>(i), static_cast<int>(i)))) return false;
      }
      return true;
  }
  return false;
}

bool lower_bound_check(const LongTermMemory& mem, const Template& candidate, const LowerBoundConfig& bound,
                       double gamma) {
  return mem.passes_bound(mem.similarities(candidate.feature), bound, gamma);
}

Decision LongTermMemory::consider(const Template& candidate, const LowerBoundConfig& bound, double gamma) {
  if (candidate.feature.shape() != base().feature.shape()) {
    throw DimensionError("candidate template shape does not match the memory");
  }
  const auto sims = similarities(candidate.feature);
  Decision d;
  d.det = current_det_;
  if (!passes_bound(sims, bound, gamma)) {
    d.kind = Decision::Kind::kRejectedBound;
    return d;
  }

  const double self = candidate.feature.squared_norm();
  if (!full()) {
    gram_ = gram_.appended(sims, self);
    slots_.push_back(candidate);
    current_det_ = normalized_determinant(gram_);
    d.kind = Decision::Kind::kAppended;
    d.slot = size() - 1;
    d.det = current_det_;
    return d;
  }

  // Slot 0 holds the base template and is never a replacement target.
  int best_slot = -1;
  double best_det = 0.0;
  GramMatrix best_gram;
  for (int slot = 1; slot < size(); ++slot) {
    GramMatrix trial = gram_.substituted(slot, sims, self);
    const double det = normalized_determinant(trial);
    if (best_slot < 0 || det > best_det) {
      best_slot = slot;
      best_det = det;
      best_gram = std::move(trial);
    }
  }
  if (best_slot < 0 || !(best_det > current_det_ * (1.0 + kGainEpsilon)) || !(best_det > current_det_)) {
    d.kind = Decision::Kind::kRejectedNoGain;
    return d;
  }
  d.evicted_id = slots_[static_cast<std::size_t>(best_slot)].id;
  slots_[static_cast<std::size_t>(best_slot)] = candidate;
  gram_ = std::move(best_gram);
  current_det_ = best_det;
  d.kind = Decision::Kind::kReplaced;
  d.slot = best_slot;
  d.det = current_det_;
  return d;
}

ShortTermMemory::ShortTermMemory(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw ParameterError("short-term memory capacity must be >= 1");
}

void ShortTermMemory::push(Template t) {
  if (!queue_.empty() && t.feature.shape() != queue_.front().feature.shape()) {
    throw DimensionError("short-term template shape does not match the memory");
  }
  queue_.push_back(std::move(t));
  while (static_cast<int>(queue_.size()) > capacity_) queue_.pop_front();
  rebuild_gram();
}

void ShortTermMemory::reinitialize(Template seed) {
  queue_.clear();
  push(std::move(seed));
}

void ShortTermMemory::rebuild_gram() {
  const int n = size();
  gram_ = GramMatrix(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      gram_.set_symmetric(i, j, inner_product(queue_[static_cast<std::size_t>(i)].feature,
                                              queue_[static_cast<std::size_t>(j)].feature));
    }
  }
}

double ShortTermMemory::diversity(GammaVariant variant) const { return gram_diversity(gram_, variant); }

double gram_diversity(const GramMatrix& g, GammaVariant variant) {
  const int n = g.size();
  if (n < 2) return 0.0;
  const auto entries = g.entries();
  const double gmax = *std::max_element(entries.begin(), entries.end());
  if (!(gmax > 0.0)) return 0.0;
  double upper = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) upper += g.at(i, j);
  }
  const double pairs = variant == GammaVariant::kAsWritten ? static_cast<double>(n) * (n + 1)
                                                           : static_cast<double>(n) * (n - 1);
  const double gamma = 1.0 - 2.0 / (pairs * gmax) * upper;
  return std::clamp(gamma, 0.0, 1.0);
}

bool should_consider(int frame_index, int dilation) {
  if (dilation < 1) throw ParameterError("dilation must be >= 1");
  return frame_index % dilation == 0;
}

}  // namespace thor
