#include "thor/gram.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thor/core_space.hpp"
#include "thor/errors.hpp"

namespace thor {

namespace {

constexpr double kSymmetryTolerance = 1e-9;
constexpr double kNegativeDetTolerance = 1e-9;

}  // namespace

GramMatrix::GramMatrix(int n) : n_(n), entries_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0) {
  if (n < 0) throw DimensionError("GramMatrix: negative size");
}

GramMatrix::GramMatrix(int n, std::vector<double> entries) : n_(n), entries_(std::move(entries)) {
  if (n < 0 || entries_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw DimensionError("GramMatrix: expected " + std::to_string(n) + "x" + std::to_string(n) + " entries");
  }
  double scale = 1.0;
  for (double v : entries_) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (std::abs(at(i, j) - at(j, i)) > kSymmetryTolerance * scale) {
        throw DimensionError("GramMatrix: entries are not symmetric");
      }
    }
  }
}

void GramMatrix::set_symmetric(int i, int j, double v) {
  entries_[static_cast<std::size_t>(i) * n_ + j] = v;
  entries_[static_cast<std::size_t>(j) * n_ + i] = v;
}

GramMatrix GramMatrix::appended(std::span<const double> row, double self) const {
  if (row.size() < static_cast<std::size_t>(n_)) throw DimensionError("GramMatrix::appended: row too short");
  GramMatrix out(n_ + 1);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) out.entries_[static_cast<std::size_t>(i) * (n_ + 1) + j] = at(i, j);
  }
  for (int i = 0; i < n_; ++i) out.set_symmetric(i, n_, row[static_cast<std::size_t>(i)]);
  out.set_symmetric(n_, n_, self);
  return out;
}

GramMatrix GramMatrix::substituted(int slot, std::span<const double> row, double self) const {
  if (slot < 0 || slot >= n_) {
    throw IndexError("GramMatrix::substituted: slot " + std::to_string(slot) + " outside [0, " + std::to_string(n_) + ")");
  }
  if (row.size() < static_cast<std::size_t>(n_)) throw DimensionError("GramMatrix::substituted: row too short");
  GramMatrix out = *this;
  for (int i = 0; i < n_; ++i) {
    if (i != slot) out.set_symmetric(i, slot, row[static_cast<std::size_t>(i)]);
  }
  out.set_symmetric(slot, slot, self);
  return out;
}

GramMatrix build_gram(std::span<const FeatureTensor> features) {
  if (features.empty()) throw DimensionError("build_gram: no features");
  const int n = static_cast<int>(features.size());
  GramMatrix g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      g.set_symmetric(i, j, inner_product(features[static_cast<std::size_t>(i)], features[static_cast<std::size_t>(j)]));
    }
  }
  return g;
}

double lu_determinant(std::span<const double> square, int n) {
  if (n < 0 || square.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw DimensionError("lu_determinant: matrix is not square");
  }
  std::vector<double> a(square.begin(), square.end());
  auto m = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * n + c]; };
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
    }
    if (m(pivot, col) == 0.0) return 0.0;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(m(pivot, c), m(col, c));
      det = -det;
    }
    const double p = m(col, col);
    det *= p;
    for (int r = col + 1; r < n; ++r) {
      const double factor = m(r, col) / p;
      if (factor == 0.0) continue;
      for (int c = col + 1; c < n; ++c) m(r, c) -= factor * m(col, c);
    }
  }
  return det;
}

double determinant(const GramMatrix& g) { return lu_determinant(g.entries(), g.size()); }

double normalized_determinant(const GramMatrix& g) {
  if (g.size() == 0) throw DimensionError("normalized_determinant: empty matrix");
  const double g11 = g.at(0, 0);
  if (!(g11 > 0.0)) throw DegenerateInputError("normalized_determinant: G_11 must be positive");
  std::vector<double> scaled(g.entries().begin(), g.entries().end());
  for (double& v : scaled) v /= g11;
  return lu_determinant(scaled, g.size());
}

double substitute_and_det(const GramMatrix& g, std::span<const FeatureTensor> features, const FeatureTensor& candidate,
                          int slot) {
  if (slot < 0 || slot >= g.size()) {
    throw IndexError("substitute_and_det: slot " + std::to_string(slot) + " outside [0, " + std::to_string(g.size()) + ")");
  }
  if (features.size() != static_cast<std::size_t>(g.size())) {
    throw DimensionError("substitute_and_det: feature count does not match Gram size");
  }
  std::vector<double> row(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (static_cast<int>(i) != slot) row[i] = inner_product(candidate, features[i]);
  }
  return determinant(g.substituted(slot, row, inner_product(candidate, candidate)));
}

double parallelotope_volume(const GramMatrix& g) {
  const double det = determinant(g);
  if (det < -kNegativeDetTolerance) {
    throw NumericError("parallelotope_volume: Gram determinant " + std::to_string(det) + " is negative");
  }
  return std::sqrt(std::max(det, 0.0));
}

}  // namespace thor
