#pragma once

// Gram matrices over template features and their determinants. The Gram
// determinant is the squared volume of the parallelotope spanned by the
// features; the long-term memory maximizes it.

#include <span>
#include <vector>

#include "thor/feature_tensor.hpp"

namespace thor {

class GramMatrix {
 public:
  GramMatrix() = default;
  explicit GramMatrix(int n);  // zero matrix
  // Throws DimensionError unless entries.size() == n*n, and when entries are
  // not symmetric within 1e-9 (relative to the largest magnitude).
  GramMatrix(int n, std::vector<double> entries);

  int size() const { return n_; }
  double at(int i, int j) const { return entries_[static_cast<std::size_t>(i) * n_ + j]; }
  // Sets both (i, j) and (j, i).
  void set_symmetric(int i, int j, double v);
  std::span<const double> entries() const { return entries_; }

  // Copy grown by one row/column. `row` holds similarities to existing entries.
  GramMatrix appended(std::span<const double> row, double self) const;
  // Copy with row/column `slot` replaced. row[slot] is ignored in favor of `self`.
  GramMatrix substituted(int slot, std::span<const double> row, double self) const;

  friend bool operator==(const GramMatrix&, const GramMatrix&) = default;

 private:
  int n_ = 0;
  std::vector<double> entries_;
};

// Pairwise inner products of same-shape features.
GramMatrix build_gram(std::span<const FeatureTensor> features);

// Determinant by LU factorization with partial pivoting. Exactly singular
// matrices yield 0.
double determinant(const GramMatrix& g);
double lu_determinant(std::span<const double> square, int n);

// det(G / G_11) = det(G) / G_11^n. Throws DegenerateInputError if G_11 <= 0.
double normalized_determinant(const GramMatrix& g);

// Determinant of G after replacing the features at `slot` by `candidate`.
// G is not modified.
double substitute_and_det(const GramMatrix& g, std::span<const FeatureTensor> features, const FeatureTensor& candidate,
                          int slot);

// sqrt(det G). Determinants in [-1e-9, 0) are clamped to zero; anything more
// negative throws NumericError since a Gram matrix is positive semi-definite.
double parallelotope_volume(const GramMatrix& g);

}  // namespace thor
