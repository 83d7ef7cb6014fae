#pragma once

// Shared helpers for the unit tests: seeded RNG, random tensors, a scratch
// directory, and small reference implementations.

#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "thor/feature_tensor.hpp"
#include "thor/memory.hpp"

namespace test {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline thor::FeatureTensor random_tensor(std::mt19937_64& g, int c, int h, int w) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(c) * h * w);
  for (double& x : v) x = n(g);
  return thor::FeatureTensor(c, h, w, std::move(v));
}

inline thor::FeatureTensor unit_vector(std::mt19937_64& g, int d) {
  auto t = random_tensor(g, 1, 1, d);
  const double n = t.norm();
  for (double& x : t.data()) x /= n;
  return t;
}

inline thor::FeatureTensor basis(int d, int i) {
  std::vector<double> v(static_cast<std::size_t>(d), 0.0);
  v[static_cast<std::size_t>(i)] = 1.0;
  return thor::FeatureTensor::from_vector(v);
}

inline thor::Template make_template(thor::FeatureTensor f, std::uint64_t id = 0, int frame = 0) {
  thor::Template t;
  t.id = id;
  t.frame_index = frame;
  t.feature = std::move(f);
  t.capture_box = {0, 0, 10, 10};
  return t;
}

// Laplace expansion along the first row.
inline double cofactor_det(const std::vector<double>& m, int n) {
  if (n == 1) return m[0];
  if (n == 2) return m[0] * m[3] - m[1] * m[2];
  double det = 0.0;
  std::vector<double> minor(static_cast<std::size_t>(n - 1) * (n - 1));
  for (int col = 0; col < n; ++col) {
    int k = 0;
    for (int r = 1; r < n; ++r)
      for (int c = 0; c < n; ++c)
        if (c != col) minor[static_cast<std::size_t>(k++)] = m[static_cast<std::size_t>(r) * n + c];
    const double sign = col % 2 == 0 ? 1.0 : -1.0;
    det += sign * m[static_cast<std::size_t>(col)] * cofactor_det(minor, n - 1);
  }
  return det;
}

inline std::vector<double> gram_of(const std::vector<thor::FeatureTensor>& fs) {
  const int n = static_cast<int>(fs.size());
  std::vector<double> g(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < fs[i].size(); ++k) acc += fs[i].data()[k] * fs[j].data()[k];
      g[static_cast<std::size_t>(i) * n + j] = acc;
    }
  return g;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("thor_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace test
