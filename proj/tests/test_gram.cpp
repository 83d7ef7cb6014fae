#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "thor/core_space.hpp"
#include "thor/errors.hpp"
#include "thor/gram.hpp"

using namespace thor;

namespace {

FeatureTensor unit2(double degrees) {
  const double r = degrees * M_PI / 180.0;
  return FeatureTensor::from_vector({std::cos(r), std::sin(r)});
}

}  // namespace

TEST(BuildGram, OrthonormalIsIdentity) {
  std::vector<FeatureTensor> fs{test::basis(3, 0), test::basis(3, 1)};
  auto g = build_gram(fs);
  ASSERT_EQ(g.size(), 2);
  EXPECT_EQ(g.at(0, 0), 1.0);
  EXPECT_EQ(g.at(0, 1), 0.0);
  EXPECT_EQ(g.at(1, 1), 1.0);
}

TEST(BuildGram, DuplicateRows) {
  auto f = FeatureTensor::from_vector({1, 2, 2});
  std::vector<FeatureTensor> fs{f, f};
  auto g = build_gram(fs);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(g.at(i, j), 9.0);
}

TEST(BuildGram, SixtyDegrees) {
  std::vector<FeatureTensor> fs{unit2(0), unit2(60)};
  auto g = build_gram(fs);
  EXPECT_NEAR(g.at(0, 1), 0.5, 1e-15);
  EXPECT_NEAR(g.at(1, 0), 0.5, 1e-15);
}

TEST(BuildGram, SymmetricAndMatchesOracle) {
  auto rng = test::rng(21);
  std::vector<FeatureTensor> fs;
  for (int i = 0; i < 5; ++i) fs.push_back(test::random_tensor(rng, 2, 3, 3));
  auto g = build_gram(fs);
  auto want = test::gram_of(fs);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      EXPECT_EQ(g.at(i, j), g.at(j, i));
      EXPECT_NEAR(g.at(i, j), want[i * 5 + j], 1e-12);
    }
}

TEST(GramMatrix, RejectsAsymmetric) {
  EXPECT_THROW(GramMatrix(2, {1, 0.5, 0.4, 1}), DimensionError);
  EXPECT_THROW(GramMatrix(2, {1, 0, 1}), DimensionError);
}

TEST(Determinant, SmallCases) {
  EXPECT_DOUBLE_EQ(determinant(GramMatrix(2, {1, 0, 0, 1})), 1.0);
  EXPECT_DOUBLE_EQ(determinant(GramMatrix(2, {1, 1, 1, 1})), 0.0);
  EXPECT_NEAR(determinant(GramMatrix(2, {1, 0.5, 0.5, 1})), 0.75, 1e-15);
}

TEST(Determinant, MatchesCofactorOracle) {
  auto rng = test::rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    std::vector<FeatureTensor> fs;
    for (int i = 0; i < n; ++i) fs.push_back(test::random_tensor(rng, 1, 1, 8));
    auto g = build_gram(fs);
    const double want = test::cofactor_det(std::vector<double>(g.entries().begin(), g.entries().end()), n);
    EXPECT_NEAR(determinant(g), want, 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST(NormalizedDeterminant, UnitDiagonalAndScaleInvariance) {
  GramMatrix g(3, {1, 0.2, 0.1, 0.2, 1, 0.3, 0.1, 0.3, 1});
  EXPECT_NEAR(normalized_determinant(g), determinant(g), 1e-15);
  std::vector<double> scaled(g.entries().begin(), g.entries().end());
  for (double& v : scaled) v *= 7.5;
  EXPECT_NEAR(normalized_determinant(GramMatrix(3, scaled)), normalized_determinant(g), 1e-12);
}

TEST(NormalizedDeterminant, ExplicitDivision) {
  EXPECT_NEAR(normalized_determinant(GramMatrix(2, {4, 2, 2, 4})), 0.75, 1e-15);
}

TEST(NormalizedDeterminant, ZeroLeadingEntryThrows) {
  EXPECT_THROW(normalized_determinant(GramMatrix(2, {0, 0, 0, 1})), DegenerateInputError);
}

TEST(SubstituteAndDet, SelfSubstitution) {
  auto rng = test::rng(29);
  std::vector<FeatureTensor> fs;
  for (int i = 0; i < 4; ++i) fs.push_back(test::random_tensor(rng, 1, 1, 6));
  auto g = build_gram(fs);
  for (int slot = 0; slot < 4; ++slot) EXPECT_NEAR(substitute_and_det(g, fs, fs[slot], slot), determinant(g), 1e-10);
}

TEST(SubstituteAndDet, DuplicateGivesZero) {
  std::vector<FeatureTensor> fs{test::basis(2, 0), test::basis(2, 1)};
  EXPECT_NEAR(substitute_and_det(build_gram(fs), fs, test::basis(2, 0), 1), 0.0, 1e-15);
}

TEST(SubstituteAndDet, MatchesFullRebuild) {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<FeatureTensor> fs{test::basis(2, 0), FeatureTensor::from_vector({s, s})};
  EXPECT_NEAR(substitute_and_det(build_gram(fs), fs, test::basis(2, 1), 1), 1.0, 1e-15);

  auto rng = test::rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<FeatureTensor> r;
    for (int i = 0; i < 4; ++i) r.push_back(test::random_tensor(rng, 1, 1, 5));
    auto cand = test::random_tensor(rng, 1, 1, 5);
    const int slot = trial % 4;
    auto rebuilt = r;
    rebuilt[slot] = cand;
    const double want = test::cofactor_det(test::gram_of(rebuilt), 4);
    EXPECT_NEAR(substitute_and_det(build_gram(r), r, cand, slot), want, 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST(SubstituteAndDet, DoesNotModifyInput) {
  std::vector<FeatureTensor> fs{test::basis(3, 0), test::basis(3, 1)};
  auto g = build_gram(fs);
  auto copy = g;
  substitute_and_det(g, fs, test::basis(3, 2), 1);
  EXPECT_EQ(g, copy);
}

TEST(ParallelotopeVolume, Cases) {
  std::vector<double> id(16, 0.0);
  for (int i = 0; i < 4; ++i) id[i * 5] = 1.0;
  EXPECT_DOUBLE_EQ(parallelotope_volume(GramMatrix(4, id)), 1.0);
  EXPECT_DOUBLE_EQ(parallelotope_volume(GramMatrix(2, {1, 1, 1, 1})), 0.0);
  std::vector<FeatureTensor> fs{unit2(0), unit2(30)};
  EXPECT_NEAR(parallelotope_volume(build_gram(fs)), 0.5, 1e-12);
}

TEST(ParallelotopeVolume, TinyNegativeClampsLargeNegativeThrows) {
  // det = 1 - (1 + 1e-10)^2, a rounding-sized negative
  EXPECT_EQ(parallelotope_volume(GramMatrix(2, {1, 1 + 1e-10, 1 + 1e-10, 1})), 0.0);
  EXPECT_THROW(parallelotope_volume(GramMatrix(2, {1, 2, 2, 1})), NumericError);
}

TEST(GramMatrix, AppendedAndSubstituted) {
  auto rng = test::rng(37);
  std::vector<FeatureTensor> fs;
  for (int i = 0; i < 3; ++i) fs.push_back(test::random_tensor(rng, 1, 1, 4));
  auto g2 = build_gram(std::vector<FeatureTensor>{fs[0], fs[1]});
  std::vector<double> row{inner_product(fs[2], fs[0]), inner_product(fs[2], fs[1])};
  auto g3 = g2.appended(row, fs[2].squared_norm());
  auto want = build_gram(fs);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(g3.at(i, j), want.at(i, j), 1e-12);

  auto cand = test::random_tensor(rng, 1, 1, 4);
  std::vector<double> srow;
  for (const auto& f : fs) srow.push_back(inner_product(cand, f));
  auto sub = want.substituted(1, srow, cand.squared_norm());
  auto swapped = fs;
  swapped[1] = cand;
  auto want_sub = build_gram(swapped);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(sub.at(i, j), want_sub.at(i, j), 1e-12);
}
