#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lapsparse/graph.hpp"

namespace lapsparse {

struct Entry {
  NodeId row;
  NodeId col;
  double weight;

  friend bool operator==(const Entry&, const Entry&) = default;
};

/// Square sparse matrix in coordinate form. Entries are kept sorted by
/// (row, col) with no duplicates; this is the canonical order used for
/// matvecs and serialization.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  explicit SparseMatrix(std::size_t n) : n_(n) {}

  /// Takes entries already sorted by (row, col) and unique.
  static SparseMatrix from_sorted(std::size_t n, std::vector<Entry> entries);
  /// Sorts entries and sums duplicates in their input order.
  static SparseMatrix from_triplets(std::size_t n, std::vector<Entry> entries);
  static SparseMatrix identity(std::size_t n, double scale = 1.0);

  std::size_t dim() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  std::span<const Entry> entries() const noexcept { return entries_; }

  /// Value at (row, col); zero when absent.
  double at(NodeId row, NodeId col) const noexcept;
  double sum() const noexcept;

  SparseMatrix scaled(double factor) const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Entry> entries_;
};

/// a * x + b * y, merged entrywise. Dimensions must agree.
SparseMatrix linear_combination(double a, const SparseMatrix& x, double b, const SparseMatrix& y);

/// (M + M^T) / 2.
SparseMatrix symmetrized(const SparseMatrix& m);

}  // namespace lapsparse
