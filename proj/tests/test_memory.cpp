#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "thor/errors.hpp"
#include "thor/feature_io.hpp"
#include "thor/memory.hpp"
#include "thor/snapshot.hpp"

using namespace thor;
using test::basis;
using test::make_template;

namespace {

const LowerBoundConfig kNoBound{BoundMode::kNone, 0.0};

// Unit vector in the plane of e_1, e_2 with inner product `s` against e_1.
FeatureTensor with_similarity(double s, int d = 3) {
  std::vector<double> v(static_cast<std::size_t>(d), 0.0);
  v[0] = s;
  v[1] = std::sqrt(1.0 - s * s);
  return FeatureTensor::from_vector(v);
}

}  // namespace

TEST(LtmInit, SingleSlotUnitDet) {
  auto rng = test::rng(41);
  auto mem = LongTermMemory::init(make_template(test::unit_vector(rng, 6)), 8);
  EXPECT_EQ(mem.size(), 1);
  EXPECT_EQ(mem.capacity(), 8);
  EXPECT_DOUBLE_EQ(mem.current_det(), 1.0);
  EXPECT_EQ(mem.capacity_det(), 0.0);
}

TEST(LtmInit, CapacityOneNeverAccepts) {
  auto mem = LongTermMemory::init(make_template(basis(3, 0)), 1);
  EXPECT_TRUE(mem.full());
  auto d = mem.consider(make_template(basis(3, 1), 1), kNoBound, 0.0);
  EXPECT_FALSE(d.accepted());
  EXPECT_EQ(mem.size(), 1);
}

TEST(LtmInit, Errors) {
  EXPECT_THROW(LongTermMemory::init(make_template(FeatureTensor::from_vector({0, 0})), 4), DegenerateInputError);
  EXPECT_THROW(LongTermMemory::init(make_template(basis(2, 0)), 0), ParameterError);
}

TEST(LowerBound, Static) {
  auto mem = LongTermMemory::init(make_template(basis(3, 0)), 4);
  EXPECT_FALSE(lower_bound_check(mem, make_template(with_similarity(0.25)), {BoundMode::kStatic, 0.3}, 0.0));
  EXPECT_TRUE(lower_bound_check(mem, make_template(with_similarity(0.35)), {BoundMode::kStatic, 0.3}, 0.0));
}

TEST(LowerBound, DynamicSubtractsGamma) {
  auto mem = LongTermMemory::init(make_template(basis(3, 0)), 4);
  const auto c = make_template(with_similarity(0.25));
  EXPECT_TRUE(lower_bound_check(mem, c, {BoundMode::kDynamic, 0.3}, 0.1));
  EXPECT_FALSE(lower_bound_check(mem, c, {BoundMode::kDynamic, 0.3}, 0.0));
}

TEST(LowerBound, EnsembleNeedsEverySlot) {
  // slots e_1 and e_2; the candidate's similarities are 0.35 and 0.28
  auto mem = LongTermMemory::init(make_template(basis(3, 0)), 4);
  mem.consider(make_template(basis(3, 1), 1), kNoBound, 0.0);
  const double a = 0.35, b = 0.28;
  auto cand = make_template(FeatureTensor::from_vector({a, b, std::sqrt(1 - a * a - b * b)}));
  EXPECT_FALSE(lower_bound_check(mem, cand, {BoundMode::kEnsemble, 0.3}, 0.0));
  EXPECT_TRUE(lower_bound_check(mem, cand, {BoundMode::kEnsemble, 0.25}, 0.0));
}

TEST(LowerBound, NoneAcceptsAnything) {
  auto mem = LongTermMemory::init(make_template(basis(3, 0)), 4);
  EXPECT_TRUE(lower_bound_check(mem, make_template(FeatureTensor::from_vector({-1, 0, 0})), kNoBound, 0.0));
}

TEST(LtmConsider, AppendOrthogonal) {
  auto mem = LongTermMemory::init(make_template(basis(3, 0)), 3);
  mem.consider(make_template(basis(3, 1), 1), kNoBound, 0.0);
  auto d = mem.consider(make_template(basis(3, 2), 2), kNoBound, 0.0);
  EXPECT_EQ(d.kind, Decision::Kind::kAppended);
  EXPECT_EQ(d.slot, 2);
  EXPECT_NEAR(d.det, 1.0, 1e-15);
  EXPECT_TRUE(mem.full());
}

TEST(LtmConsider, ReplacesTheBestSlot) {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<Template> slots{make_template(basis(3, 0), 0), make_template(basis(3, 1), 1),
                              make_template(FeatureTensor::from_vector({s, s, 0}), 2)};
  auto mem = LongTermMemory::restore(slots, 3);
  EXPECT_NEAR(mem.current_det(), 0.0, 1e-15);

  // Exhaustive oracle: slot 1 gives 0.5, slot 2 gives 1.0.
  auto feats = mem.features();
  EXPECT_NEAR(substitute_and_det(mem.gram(), feats, basis(3, 2), 1), 0.5, 1e-12);
  EXPECT_NEAR(substitute_and_det(mem.gram(), feats, basis(3, 2), 2), 1.0, 1e-12);

  auto d = mem.consider(make_template(basis(3, 2), 3), kNoBound, 0.0);
  EXPECT_EQ(d.kind, Decision::Kind::kReplaced);
  EXPECT_EQ(d.slot, 2);
  EXPECT_EQ(d.evicted_id, 2u);
  EXPECT_NEAR(d.det, 1.0, 1e-12);
  EXPECT_EQ(mem.slots()[2].id, 3u);
}

TEST(LtmConsider, DuplicateIsNoGain) {
  auto rng = test::rng(43);
  std::vector<Template> slots;
  for (int i = 0; i < 4; ++i) slots.push_back(make_template(test::unit_vector(rng, 6), i));
  auto mem = LongTermMemory::restore(slots, 4);
  const double before = mem.current_det();
  auto d = mem.consider(make_template(slots[2].feature, 9), kNoBound, 0.0);
  EXPECT_EQ(d.kind, Decision::Kind::kRejectedNoGain);
  EXPECT_EQ(mem.current_det(), before);
}

TEST(LtmConsider, BoundRejectionLeavesMemoryUntouched) {
  auto mem = LongTermMemory::init(make_template(basis(3, 0)), 4);
  auto gram = mem.gram();
  auto d = mem.consider(make_template(basis(3, 1), 1), {BoundMode::kStatic, 0.5}, 0.0);
  EXPECT_EQ(d.kind, Decision::Kind::kRejectedBound);
  EXPECT_EQ(mem.size(), 1);
  EXPECT_EQ(mem.gram(), gram);
}

TEST(LtmConsider, BaseNeverReplaced) {
  auto rng = test::rng(47);
  auto mem = LongTermMemory::init(make_template(test::unit_vector(rng, 5), 0), 3);
  for (int i = 1; i < 200; ++i) mem.consider(make_template(test::unit_vector(rng, 5), i), kNoBound, 0.0);
  EXPECT_EQ(mem.base().id, 0u);
}

TEST(LtmConsider, DeterminantNeverDecreasesOnceFull) {
  auto rng = test::rng(53);
  auto mem = LongTermMemory::init(make_template(test::unit_vector(rng, 8), 0), 5);
  double last = 0.0;
  for (int i = 1; i < 300; ++i) {
    auto d = mem.consider(make_template(test::unit_vector(rng, 8), i), kNoBound, 0.0);
    if (mem.full()) {
      EXPECT_GE(mem.capacity_det(), last);
      if (d.kind == Decision::Kind::kReplaced) EXPECT_GT(d.det, last);
      last = mem.capacity_det();
    }
  }
}

TEST(LtmConsider, ShapeMismatchThrows) {
  auto mem = LongTermMemory::init(make_template(basis(3, 0)), 3);
  EXPECT_THROW(mem.consider(make_template(basis(4, 0)), kNoBound, 0.0), DimensionError);
}

TEST(Stm, PushAndFifo) {
  ShortTermMemory stm(3);
  stm.push(make_template(basis(4, 0), 1));
  EXPECT_EQ(stm.size(), 1);
  for (int i = 2; i <= 4; ++i) stm.push(make_template(basis(4, i - 1), static_cast<std::uint64_t>(i)));
  ASSERT_EQ(stm.size(), 3);
  EXPECT_EQ(stm.templates()[0].id, 2u);
  EXPECT_EQ(stm.templates()[1].id, 3u);
  EXPECT_EQ(stm.templates()[2].id, 4u);
}

TEST(Stm, DuplicatesAccepted) {
  ShortTermMemory stm(4);
  stm.push(make_template(basis(2, 0), 1));
  stm.push(make_template(basis(2, 0), 2));
  EXPECT_EQ(stm.size(), 2);
}

TEST(Stm, DiversityOrthonormal) {
  for (int n = 2; n <= 5; ++n) {
    ShortTermMemory stm(n);
    for (int i = 0; i < n; ++i) stm.push(make_template(basis(n, i), i));
    EXPECT_EQ(stm.diversity(GammaVariant::kAsWritten), 1.0);
    EXPECT_EQ(stm.diversity(GammaVariant::kPairNormalized), 1.0);
  }
}

TEST(Stm, DiversityIdentical) {
  ShortTermMemory two(2);
  two.push(make_template(basis(3, 0)));
  two.push(make_template(basis(3, 0)));
  EXPECT_NEAR(two.diversity(), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(two.diversity(GammaVariant::kPairNormalized), 0.0, 1e-12);
}

TEST(Stm, DiversitySingleIsZero) {
  ShortTermMemory stm(4);
  EXPECT_EQ(stm.diversity(), 0.0);
  stm.push(make_template(basis(3, 0)));
  EXPECT_EQ(stm.diversity(), 0.0);
}

TEST(Stm, DiversityInUnitInterval) {
  auto rng = test::rng(59);
  for (int trial = 0; trial < 300; ++trial) {
    ShortTermMemory stm(4);
    const int n = 1 + trial % 4;
    for (int i = 0; i < n; ++i) stm.push(make_template(test::random_tensor(rng, 1, 1, 3)));
    for (auto v : {GammaVariant::kAsWritten, GammaVariant::kPairNormalized}) {
      const double g = stm.diversity(v);
      EXPECT_GE(g, 0.0);
      EXPECT_LE(g, 1.0);
    }
  }
}

TEST(Stm, Reinitialize) {
  ShortTermMemory stm(3);
  for (int i = 0; i < 3; ++i) stm.push(make_template(basis(3, i), i));
  stm.reinitialize(make_template(basis(3, 1), 7));
  ASSERT_EQ(stm.size(), 1);
  EXPECT_EQ(stm.templates()[0].id, 7u);
  EXPECT_EQ(stm.diversity(), 0.0);
  stm.reinitialize(make_template(basis(3, 1), 8));
  ASSERT_EQ(stm.size(), 1);
  EXPECT_EQ(stm.templates()[0].id, 8u);
}

TEST(ShouldConsider, Dilation) {
  EXPECT_TRUE(should_consider(0, 10));
  EXPECT_TRUE(should_consider(10, 10));
  EXPECT_FALSE(should_consider(7, 10));
  EXPECT_TRUE(should_consider(7, 1));
  EXPECT_THROW(should_consider(3, 0), ParameterError);
}

TEST(BoundMode, NamesRoundTrip) {
  for (auto m : {BoundMode::kStatic, BoundMode::kDynamic, BoundMode::kEnsemble, BoundMode::kNone}) {
    EXPECT_EQ(parse_bound_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_bound_mode("loose"), Error);
}

TEST(Snapshot, RoundTripBitExact) {
  test::TempDir dir;
  auto rng = test::rng(61);
  std::vector<Template> slots;
  for (int i = 0; i < 4; ++i) {
    auto t = make_template(test::random_tensor(rng, 2, 3, 3), 10 + i, i * 10);
    t.capture_box = {1.25 * i, 2.5, 30.0 + i, 41.0};
    slots.push_back(t);
  }
  auto mem = LongTermMemory::restore(slots, 6);
  auto snap = snapshot_of(mem);
  save_snapshot(snap, dir.path() / "m");
  auto back = load_snapshot(dir.path() / "m");
  EXPECT_EQ(back.capacity, 6);
  EXPECT_EQ(back.normalized_det, snap.normalized_det);
  ASSERT_EQ(back.templates.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(back.templates[i].feature, slots[i].feature);
    EXPECT_EQ(back.templates[i].id, slots[i].id);
    EXPECT_EQ(back.templates[i].frame_index, slots[i].frame_index);
    EXPECT_EQ(back.templates[i].capture_box, slots[i].capture_box);
  }
  auto restored = LongTermMemory::restore(back.templates, back.capacity);
  EXPECT_EQ(restored.current_det(), mem.current_det());
}

TEST(Snapshot, MissingManifest) {
  test::TempDir dir;
  EXPECT_THROW(load_snapshot(dir.path()), Error);
}
