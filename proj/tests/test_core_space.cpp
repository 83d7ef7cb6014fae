#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "test_support.hpp"
#include "thor/core_space.hpp"
#include "thor/errors.hpp"
#include "thor/feature_io.hpp"

using namespace thor;

namespace {

FeatureTensor grid3x3() { return FeatureTensor(1, 3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9}); }

// Straight four-loop correlation used as the reference.
std::vector<double> naive_correlation(const FeatureTensor& k, const FeatureTensor& s) {
  const int oh = s.height() - k.height() + 1;
  const int ow = s.width() - k.width() + 1;
  std::vector<double> out(static_cast<std::size_t>(oh) * ow, 0.0);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int c = 0; c < k.channels(); ++c)
        for (int i = 0; i < k.height(); ++i)
          for (int j = 0; j < k.width(); ++j) acc += k.at(c, i, j) * s.at(c, y + i, x + j);
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  return out;
}

}  // namespace

TEST(InnerProduct, BasisVectors) {
  auto e1 = FeatureTensor::from_vector({1, 0, 0});
  auto e2 = FeatureTensor::from_vector({0, 1, 0});
  EXPECT_DOUBLE_EQ(inner_product(e1, e1), 1.0);
  EXPECT_DOUBLE_EQ(inner_product(e1, e2), 0.0);
}

TEST(InnerProduct, HandEvaluated) {
  EXPECT_DOUBLE_EQ(inner_product(FeatureTensor::from_vector({1, 2, 3}), FeatureTensor::from_vector({4, 5, 6})), 32.0);
}

TEST(InnerProduct, ShapeMismatchThrows) {
  EXPECT_THROW(inner_product(FeatureTensor::from_vector({1, 2}), FeatureTensor::from_vector({1, 2, 3})),
               DimensionError);
}

TEST(FeatureTensor, RejectsNonFinite) {
  EXPECT_THROW(FeatureTensor(1, 1, 2, {1.0, std::nan("")}), Error);
  EXPECT_THROW(FeatureTensor(1, 2, 2, {1.0, 2.0}), Error);
}

TEST(CrossCorrelate, ScalarKernel) {
  FeatureTensor k(1, 1, 1, {2.0});
  FeatureTensor s(1, 3, 3, std::vector<double>(9, 1.0));
  auto m = cross_correlate(k, s);
  ASSERT_EQ(m.height(), 3);
  ASSERT_EQ(m.width(), 3);
  for (double v : m.scores()) EXPECT_DOUBLE_EQ(v, 2.0);
}

TEST(CrossCorrelate, HandEvaluatedDiagonalKernel) {
  FeatureTensor k(1, 2, 2, {1, 0, 0, 1});
  auto m = cross_correlate(k, grid3x3());
  ASSERT_EQ(m.height(), 2);
  EXPECT_DOUBLE_EQ(m.at(0, 0), 6);
  EXPECT_DOUBLE_EQ(m.at(0, 1), 8);
  EXPECT_DOUBLE_EQ(m.at(1, 0), 12);
  EXPECT_DOUBLE_EQ(m.at(1, 1), 14);
}

TEST(CrossCorrelate, SelfMatchPeaksAtSubPatch) {
  auto rng = test::rng(3);
  FeatureTensor s = test::random_tensor(rng, 2, 12, 12);
  FeatureTensor k(2, 4, 5);
  for (int c = 0; c < 2; ++c)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 5; ++x) k.at(c, y, x) = s.at(c, 6 + y, 3 + x);
  auto m = cross_correlate(k, s);
  EXPECT_NEAR(m.at(6, 3), inner_product(k, k), 1e-12);
}

TEST(CrossCorrelate, MatchesNaiveLoops) {
  auto rng = test::rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int c = 1 + trial % 3;
    FeatureTensor s = test::random_tensor(rng, c, 9 + trial % 4, 11);
    FeatureTensor k = test::random_tensor(rng, c, 1 + trial % 5, 1 + trial % 6);
    auto m = cross_correlate(k, s);
    auto want = naive_correlation(k, s);
    ASSERT_EQ(m.scores().size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(m.scores()[i], want[i], 1e-10);
  }
}

TEST(CrossCorrelate, KernelLargerThanSearchThrows) {
  EXPECT_THROW(cross_correlate(FeatureTensor(1, 4, 4), FeatureTensor(1, 3, 3)), DimensionError);
}

TEST(BatchCrossCorrelate, SingletonAndDuplicates) {
  auto rng = test::rng(7);
  FeatureTensor s = test::random_tensor(rng, 1, 10, 10);
  FeatureTensor k = test::random_tensor(rng, 1, 4, 4);
  std::vector<FeatureTensor> one{k};
  auto single = batch_cross_correlate(one, s);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].scores()[0], cross_correlate(k, s).scores()[0]);
  std::vector<FeatureTensor> two{k, k};
  auto pair = batch_cross_correlate(two, s);
  ASSERT_EQ(pair.size(), 2u);
  EXPECT_TRUE(std::equal(pair[0].scores().begin(), pair[0].scores().end(), pair[1].scores().begin()));
}

TEST(BatchCrossCorrelate, BitIdenticalToSequentialCalls) {
  auto rng = test::rng(11);
  for (int n : {1, 3, 4, 5, 8, 12}) {
    FeatureTensor s = test::random_tensor(rng, 2, 40, 40);
    std::vector<FeatureTensor> ks;
    for (int i = 0; i < n; ++i) ks.push_back(test::random_tensor(rng, 2, 16, 16));
    auto batch = batch_cross_correlate(ks, s);
    ASSERT_EQ(batch.size(), ks.size());
    for (int i = 0; i < n; ++i) {
      auto one = cross_correlate(ks[i], s);
      for (std::size_t j = 0; j < one.scores().size(); ++j) ASSERT_EQ(batch[i].scores()[j], one.scores()[j]);
    }
  }
}

TEST(TukeyWindow, RectangularLimit) {
  auto g = tapered_cosine_window(4, 7, 0.0);
  for (double v : g.values) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(TukeyWindow, HannLengthFive) {
  auto w = tukey_window(5, 1.0);
  const double want[] = {0.0, 0.5, 1.0, 0.5, 0.0};
  ASSERT_EQ(w.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(w[i], want[i], 1e-15);
}

TEST(TukeyWindow, Symmetric) {
  auto w = tukey_window(8, 0.5);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(w[i], w[7 - i], 1e-15);
  for (double v : w) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(TukeyWindow, OuterProduct) {
  auto g = tapered_cosine_window(5, 8, 0.5);
  auto wy = tukey_window(5, 0.5);
  auto wx = tukey_window(8, 0.5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 8; ++x) EXPECT_DOUBLE_EQ(g.at(y, x), wy[y] * wx[x]);
}

TEST(TukeyWindow, BadAlphaThrows) {
  EXPECT_THROW(tukey_window(5, 1.5), ParameterError);
  EXPECT_THROW(tukey_window(0, 0.5), ParameterError);
}

TEST(ApplyMask, OnesZerosAndDiagonal) {
  FeatureTensor f(1, 2, 2, {1, 2, 3, 4});
  EXPECT_EQ(apply_mask(f, Grid(2, 2, 1.0)), f);
  const auto zeroed = apply_mask(f, Grid(2, 2, 0.0));
  for (double v : zeroed.data()) EXPECT_EQ(v, 0.0);
  Grid diag(2, 2, 0.0);
  diag.at(0, 0) = 1.0;
  diag.at(1, 1) = 1.0;
  auto m = apply_mask(f, diag);
  EXPECT_EQ(m.at(0, 0, 0), 1);
  EXPECT_EQ(m.at(0, 0, 1), 0);
  EXPECT_EQ(m.at(0, 1, 0), 0);
  EXPECT_EQ(m.at(0, 1, 1), 4);
}

TEST(ApplyMask, EveryChannelScaled) {
  FeatureTensor f(2, 1, 2, {1, 1, 2, 2});
  Grid mask(1, 2, 0.0);
  mask.at(0, 1) = 0.5;
  auto m = apply_mask(f, mask);
  EXPECT_EQ(m.at(1, 0, 1), 1.0);
  EXPECT_EQ(m.at(0, 0, 0), 0.0);
  EXPECT_THROW(apply_mask(f, Grid(2, 2, 1.0)), DimensionError);
}

TEST(L2Normalize, ThreeFourFive) {
  auto n = l2_normalize(FeatureTensor::from_vector({3, 4}));
  EXPECT_NEAR(n.data()[0], 0.6, 1e-15);
  EXPECT_NEAR(n.data()[1], 0.8, 1e-15);
}

TEST(L2Normalize, IdempotentAndZero) {
  auto rng = test::rng(13);
  auto once = l2_normalize(test::random_tensor(rng, 3, 4, 4));
  auto twice = l2_normalize(once);
  for (std::size_t i = 0; i < once.size(); ++i) EXPECT_NEAR(once.data()[i], twice.data()[i], 1e-15);
  EXPECT_THROW(l2_normalize(FeatureTensor::from_vector({0, 0})), DegenerateInputError);
}

TEST(FeatureFile, RoundTripBitExact) {
  test::TempDir dir;
  auto rng = test::rng(17);
  auto f = test::random_tensor(rng, 8, 4, 4);
  write_feature_file(f, dir.path() / "a.fts");
  auto back = read_feature_file(dir.path() / "a.fts");
  EXPECT_EQ(back, f);
  EXPECT_EQ(back.size(), 128u);
  EXPECT_EQ(back.shape(), (Shape{8, 4, 4}));
}

TEST(FeatureFile, Float32RoundTrip) {
  FeatureTensor f(1, 1, 3, {0.5, -1.25, 3.0});
  auto back = decode_feature_bytes(encode_feature_bytes(f, FeatureDtype::kFloat32));
  EXPECT_EQ(back, f);
}

TEST(FeatureFile, HeaderArithmetic) {
  const std::string bytes = encode_feature_bytes(FeatureTensor(8, 4, 4), FeatureDtype::kFloat64);
  // magic + dtype + ndim + 3 dims + 128 doubles
  EXPECT_EQ(bytes.size(), 4u + 1 + 1 + 3 * 4 + 128 * 8);
  EXPECT_EQ(bytes.substr(0, 4), "FTS1");
}

TEST(FeatureFile, TruncatedAndCorrupt) {
  std::string bytes = encode_feature_bytes(FeatureTensor(2, 3, 3));
  EXPECT_THROW(decode_feature_bytes(bytes.substr(0, bytes.size() - 1)), FormatError);
  EXPECT_THROW(decode_feature_bytes(bytes.substr(0, 5)), FormatError);
  std::string bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_feature_bytes(bad), FormatError);
  bad = bytes;
  bad[4] = 7;
  EXPECT_THROW(decode_feature_bytes(bad), FormatError);
}

TEST(FeatureFile, LowerRankPadsLeadingOnes) {
  // Hand-built ndim = 1 file with two doubles.
  std::string bytes = "FTS1";
  bytes += static_cast<char>(2);
  bytes += static_cast<char>(1);
  const std::uint32_t n = 2;
  bytes.append(reinterpret_cast<const char*>(&n), 4);
  const double vals[2] = {1.5, -2.0};
  bytes.append(reinterpret_cast<const char*>(vals), sizeof(vals));
  auto f = decode_feature_bytes(bytes);
  EXPECT_EQ(f.shape(), (Shape{1, 1, 2}));
  EXPECT_EQ(f.data()[1], -2.0);
}

TEST(FeatureFile, MissingFile) {
  EXPECT_THROW(read_feature_file("/nonexistent/x.fts"), Error);
}
