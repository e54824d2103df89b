#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lapsparse/graph.hpp"
#include "lapsparse/sparse_matrix.hpp"

namespace lapsparse {

/// Polynomial coefficients w_0..w_K of sum_k w_k P^k. Signed values are
/// allowed; the vector must be non-empty, finite and not all zero.
class CoeffVector {
 public:
  explicit CoeffVector(std::vector<double> w);

  unsigned max_hop() const noexcept { return static_cast<unsigned>(w_.size() - 1); }
  double operator[](unsigned k) const noexcept { return w_[k]; }
  std::span<const double> values() const noexcept { return w_; }

  /// sum_{k>=1} |w_k|: the mass distributed over sampled hops.
  double sampled_l1() const noexcept;
  bool has_negative() const noexcept;

  CoeffVector negated() const;

 private:
  std::vector<double> w_;
};

enum class SamplingMode { kStatic, kLearnable, kNodeWise };

std::string_view to_string(SamplingMode mode) noexcept;
/// Accepts "static", "learnable" and "nodewise"; throws InvalidInput otherwise.
SamplingMode parse_mode(std::string_view text);

struct SampleCount {
  std::uint64_t samples;
};

/// Budget of ceil(ec * population * ln n) samples per propagation hop.
struct EcFactor {
  double ec;
};

using SampleBudget = std::variant<SampleCount, EcFactor>;

/// Resolves a budget to the number of samples drawn for one hop. The
/// population is n for the whole-graph regimes and |U| for node-wise sampling.
/// The result is at least 1.
std::uint64_t samples_per_hop(const SampleBudget& budget, std::size_t population, std::size_t n);

struct SamplerConfig {
  /// Static regime: SampleCount is the total M shared by all hops, EcFactor
  /// gives K * ceil(ec n ln n). Learnable and node-wise: per-hop M.
  SampleBudget budget = EcFactor{1.0};
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::kStatic;
  unsigned workers = 1;
  /// Replace the result by (M + M^T) / 2.
  bool symmetrize = false;
};

struct OperatorMeta {
  std::size_t n = 0;
  unsigned max_hop = 0;
  SamplingMode mode = SamplingMode::kStatic;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// Samples per hop (learnable, node-wise) or the static total.
  std::uint64_t budget_samples = 0;
  /// Samples actually drawn over all hops.
  std::uint64_t total_samples = 0;
  std::optional<double> ec;
  bool symmetrized = false;
  /// Signed coefficients: the similarity guarantee is heuristic.
  bool signed_coefficients = false;
  std::vector<std::string> warnings;
};

/// Sparse approximation of sum_k w_k P^k.
struct SparseOperator {
  SparseMatrix matrix;
  OperatorMeta meta;
};

/// Per-hop parts of the learnable-coefficient estimator. hops[0] is the
/// identity, hops[k] estimates P^k without any coefficient factor.
struct HopPartitionedOperator {
  std::vector<SparseMatrix> hops;
  OperatorMeta meta;

  unsigned max_hop() const noexcept { return static_cast<unsigned>(hops.size() - 1); }
  std::size_t total_nnz() const noexcept;
};

/// Static-coefficient sparsification. Hop 0 is added exactly as w_0 I; each
/// of the M samples draws a hop k >= 1 with probability |w_k| / sum_{j>=1}|w_j|
/// and an entry of D (D^-1 A)^k, accumulating
///   sgn(w_k) * sum_{j>=1}|w_j| * d_u^-1/2 d_v^-1/2 * vol / M
/// on (u, v). When w_1..w_K are all zero the result is w_0 I with a warning.
SparseOperator slsgc(const Graph& g, const CoeffVector& w, const SamplerConfig& cfg);

/// Learnable-coefficient sparsification: every hop 1..K is sampled
/// independently with M samples of weight d_u^-1/2 d_v^-1/2 * vol / M.
HopPartitionedOperator glsgc(const Graph& g, unsigned max_hop, const SamplerConfig& cfg);

/// Node-wise sampling restricted to the rows in `start_set`. For each hop
/// k >= 1 with w_k != 0, M walks start at u in U with probability d_u / s
/// (s = sum_{U} d) and end at v after k steps; each adds
/// w_k * d_u^-1/2 d_v^-1/2 * s / M to (u, v). Rows outside U stay empty.
SparseOperator nodewise_sample(const Graph& g, const CoeffVector& w,
                               std::span<const NodeId> start_set, const SamplerConfig& cfg);

/// sum_k w_k * hops[k].
SparseOperator collapse(const HopPartitionedOperator& op, const CoeffVector& w);

}  // namespace lapsparse
