#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lapsparse/graph.hpp"
#include "lapsparse/sparse_matrix.hpp"
#include "lapsparse/sparsifier.hpp"

namespace lapsparse {

inline constexpr std::size_t kDefaultDenseLimit = 5000;
inline constexpr std::size_t kUnbiasednessNodeLimit = 50;

/// Exact n x n operator for verification on small graphs.
struct DenseOperator {
  Eigen::MatrixXd values;
  std::string description;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(values.rows()); }
};

/// Throws ResourceLimit when the graph has more than `dense_limit` nodes.
void check_dense_limit(const Graph& g, std::size_t dense_limit);

/// P = D^-1/2 A D^-1/2.
DenseOperator dense_normalized_adjacency(const Graph& g, std::size_t dense_limit = kDefaultDenseLimit);

/// sum_k w_k P^k, evaluated by Horner's rule on dense matrices.
DenseOperator dense_poly(const Graph& g, const CoeffVector& w,
                         std::size_t dense_limit = kDefaultDenseLimit);

/// D (D^-1 A)^k.
DenseOperator dense_rw_poly(const Graph& g, unsigned k, std::size_t dense_limit = kDefaultDenseLimit);

Eigen::MatrixXd to_dense(const SparseMatrix& m);

// ---------------------------------------------------------------------------
// Unbiasedness

struct ZScoreEntry {
  unsigned part;  // hop index for partitioned estimators, 0 otherwise
  NodeId row;
  NodeId col;
  double exact;
  double mean;
  double stddev;
  double z;  // 0 for exact zero-variance matches, +-inf for deterministic bias
  bool flagged;
};

struct ZScoreTable {
  unsigned trials = 0;
  std::vector<ZScoreEntry> entries;
  std::size_t within_3sigma = 0;
  std::size_t flagged = 0;
  /// Entries with zero variance across trials whose mean differs from the
  /// exact value. Any such entry is a deterministic bias.
  std::size_t zero_variance_mismatches = 0;

  double fraction_within_3sigma() const noexcept;
  bool deterministic_bias() const noexcept { return zero_variance_mismatches > 0; }
  /// No deterministic bias and at least `min_fraction` of entries within 3 sigma.
  bool passed(double min_fraction = 0.99) const noexcept;
};

/// One trial of an estimator: dense estimates of each part for a trial seed.
using TrialEstimator = std::function<std::vector<Eigen::MatrixXd>(std::uint64_t trial_seed)>;

/// Runs `trials` independent trials (seed derive_seed(seed, {t})) and compares
/// the entrywise mean with the exact parts: z = (mean - exact) / (std / sqrt(T)).
/// Entries with |z| > 4 are flagged. Trials run on `workers` threads; the
/// result does not depend on the worker count.
ZScoreTable unbiasedness_test(std::span<const Eigen::MatrixXd> exact_parts,
                              const TrialEstimator& estimator, unsigned trials,
                              std::uint64_t seed, unsigned workers = 1);

/// Regime under test plus its parameters.
struct UnbiasednessSpec {
  SamplingMode regime = SamplingMode::kStatic;
  /// Required for static and node-wise regimes.
  std::optional<CoeffVector> coeffs;
  /// Learnable regime: hops 0..max_hop are compared part by part.
  unsigned max_hop = 0;
  std::vector<NodeId> start_set;
  SampleBudget budget = SampleCount{1000};
};

ZScoreTable unbiasedness_test(const Graph& g, const UnbiasednessSpec& spec, unsigned trials,
                              std::uint64_t seed, unsigned workers = 1,
                              std::size_t dense_limit = kDefaultDenseLimit);

// ---------------------------------------------------------------------------
// Spectral similarity

struct SimilarityOptions {
  unsigned probes = 64;
  std::uint64_t seed = 0;
  /// Generalized spectrum is computed only up to this size.
  std::size_t spectral_limit = 500;
  /// Probes with |x^T E x| < tolerance * |x|^2 are rejected.
  double probe_tolerance = 1e-9;
};

struct SimilarityReport {
  std::size_t n = 0;
  double frob_abs_err = 0.0;
  double frob_rel_err = 0.0;
  double max_abs_err = 0.0;
  std::vector<double> quad_ratios;
  std::size_t rejected_probes = 0;
  std::optional<std::pair<double, double>> eig_bounds;
  std::optional<double> epsilon_hat;
  /// Why the generalized spectrum was skipped, empty when it was computed.
  std::string spectral_skipped;
  /// Set for signed coefficients: epsilon-similarity is heuristic there.
  bool guarantee_heuristic = false;
};

SimilarityReport similarity_check(const DenseOperator& exact, const SparseMatrix& approx,
                                  const SimilarityOptions& options = {});
SimilarityReport similarity_check(const DenseOperator& exact, const SparseOperator& approx,
                                  const SimilarityOptions& options = {});

// ---------------------------------------------------------------------------
// Difference heatmap

inline constexpr double kHeatmapClip = 0.5;

/// Entrywise approx - exact over the union of both supports, clipped to
/// [-clip, clip] for display. `max_abs_diff` is the unclipped maximum.
struct DiffHeatmap {
  std::vector<Entry> cells;
  double clip = kHeatmapClip;
  double max_abs_diff = 0.0;
};

DiffHeatmap diff_heatmap(const DenseOperator& exact, const SparseMatrix& approx,
                         double clip = kHeatmapClip);

}  // namespace lapsparse
