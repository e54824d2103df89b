#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "lapsparse/graph.hpp"
#include "lapsparse/sparse_matrix.hpp"
#include "lapsparse/sparsifier.hpp"

namespace lapsparse {

/// n x F node signal, one row per node.
using Signal = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// y = op * x. Rows are processed in parallel on `workers` threads; each row
/// accumulates its entries in canonical order, so the result is independent
/// of the worker count.
Signal spmv(const SparseMatrix& op, const Signal& x, unsigned workers = 1);

/// y = P x on the graph, P = D^-1/2 A D^-1/2.
Signal normalized_adjacency_apply(const Graph& g, const Signal& x);

/// APPNP weights: w_k = alpha (1 - alpha)^k for k < K and w_K = (1 - alpha)^K.
/// Requires 0 < alpha <= 1.
CoeffVector appnp_coeffs(double alpha, unsigned max_hop);

/// sum_k w_k P^k x by K matvecs with running accumulation.
Signal exact_k_round(const Graph& g, const CoeffVector& w, const Signal& x);

/// (1 - alpha) Tr(z^T (I - P) z) + alpha |z - x|_F^2.
double appnp_loss(const Graph& g, const Signal& z, const Signal& x, double alpha);

/// Solves (I - (1 - alpha) P) z = alpha x column by column with conjugate
/// gradients until the relative residual drops below `tolerance`.
Signal appnp_fixed_point(const Graph& g, const Signal& x, double alpha, double tolerance = 1e-10,
                         unsigned max_iterations = 10000);

struct LossReport {
  double loss_exact = 0.0;
  double loss_approx = 0.0;
  double abs_err = 0.0;
  /// |L(z) - L(z~)| / |L(z)|; equals abs_err when `relative` is false.
  double rel_err = 0.0;
  /// False when L(z) == 0 and the error is reported in absolute terms.
  bool relative = true;
  double alpha = 0.0;
  unsigned max_hop = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t nnz = 0;
  bool self_loops = false;
};

/// Compares K rounds of exact APPNP propagation with one round over an SLSGC
/// operator built for the same coefficients.
LossReport loss_error_experiment(const Graph& g, const Signal& x, double alpha, unsigned max_hop,
                                 const SamplerConfig& cfg);

}  // namespace lapsparse
