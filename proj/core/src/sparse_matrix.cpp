#include "lapsparse/sparse_matrix.hpp"

#include <algorithm>

#include "lapsparse/error.hpp"

namespace lapsparse {

namespace {

bool key_less(const Entry& a, const Entry& b) noexcept {
  return a.row != b.row ? a.row < b.row : a.col < b.col;
}

bool same_key(const Entry& a, const Entry& b) noexcept { return a.row == b.row && a.col == b.col; }

}  // namespace

SparseMatrix SparseMatrix::from_sorted(std::size_t n, std::vector<Entry> entries) {
  SparseMatrix m(n);
  m.entries_ = std::move(entries);
  return m;
}

SparseMatrix SparseMatrix::from_triplets(std::size_t n, std::vector<Entry> entries) {
  for (const Entry& e : entries) {
    if (e.row >= n || e.col >= n) throw InvalidInput("sparse entry outside the matrix");
  }
  std::stable_sort(entries.begin(), entries.end(), key_less);
  std::vector<Entry> merged;
  merged.reserve(entries.size());
  for (const Entry& e : entries) {
    if (!merged.empty() && same_key(merged.back(), e)) {
      merged.back().weight += e.weight;
    } else {
      merged.push_back(e);
    }
  }
  return from_sorted(n, std::move(merged));
}

SparseMatrix SparseMatrix::identity(std::size_t n, double scale) {
  std::vector<Entry> diag(n);
  for (std::size_t u = 0; u < n; ++u) {
    diag[u] = {static_cast<NodeId>(u), static_cast<NodeId>(u), scale};
  }
  return from_sorted(n, std::move(diag));
}

double SparseMatrix::at(NodeId row, NodeId col) const noexcept {
  const Entry probe{row, col, 0.0};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), probe, key_less);
  return (it != entries_.end() && same_key(*it, probe)) ? it->weight : 0.0;
}

double SparseMatrix::sum() const noexcept {
  double s = 0.0;
  for (const Entry& e : entries_) s += e.weight;
  return s;
}

SparseMatrix SparseMatrix::scaled(double factor) const {
  SparseMatrix out = *this;
  for (Entry& e : out.entries_) e.weight *= factor;
  return out;
}

SparseMatrix linear_combination(double a, const SparseMatrix& x, double b, const SparseMatrix& y) {
  if (x.dim() != y.dim()) throw InvalidInput("matrix dimensions differ");
  const auto xs = x.entries();
  const auto ys = y.entries();
  std::vector<Entry> out;
  out.reserve(xs.size() + ys.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < xs.size() || j < ys.size()) {
    if (j == ys.size() || (i < xs.size() && key_less(xs[i], ys[j]))) {
      out.push_back({xs[i].row, xs[i].col, a * xs[i].weight});
      ++i;
    } else if (i == xs.size() || key_less(ys[j], xs[i])) {
      out.push_back({ys[j].row, ys[j].col, b * ys[j].weight});
      ++j;
    } else {
      out.push_back({xs[i].row, xs[i].col, a * xs[i].weight + b * ys[j].weight});
      ++i;
      ++j;
    }
  }
  return SparseMatrix::from_sorted(x.dim(), std::move(out));
}

SparseMatrix symmetrized(const SparseMatrix& m) {
  std::vector<Entry> both;
  both.reserve(2 * m.nnz());
  for (const Entry& e : m.entries()) {
    both.push_back({e.row, e.col, 0.5 * e.weight});
    both.push_back({e.col, e.row, 0.5 * e.weight});
  }
  return SparseMatrix::from_triplets(m.dim(), std::move(both));
}

}  // namespace lapsparse
