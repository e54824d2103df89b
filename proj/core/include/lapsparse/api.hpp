#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lapsparse/graph.hpp"
#include "lapsparse/sparsifier.hpp"
#include "lapsparse/version.hpp"

namespace lapsparse {

/// Everything needed to run one of the three sparsification regimes.
struct SparsifyOptions {
  /// Static and node-wise regimes. In the learnable regime its length fixes K
  /// when `max_hop` is absent.
  std::optional<CoeffVector> coeffs;
  std::optional<unsigned> max_hop;
  std::vector<NodeId> start_set;
  SamplerConfig sampler;
};

using SparsifyResult = std::variant<SparseOperator, HopPartitionedOperator>;

/// Dispatches on options.sampler.mode. Throws InvalidInput on missing or
/// inconsistent parameters.
SparsifyResult sparsify(const Graph& g, const SparsifyOptions& options);

const OperatorMeta& meta_of(const SparsifyResult& result) noexcept;

/// Flat edge arrays for consumers across a language boundary. `hop` is filled
/// only for hop-partitioned results (hops concatenated in order).
struct EdgeArrays {
  std::vector<std::int64_t> src;
  std::vector<std::int64_t> dst;
  std::vector<double> weight;
  std::vector<std::int32_t> hop;
};

EdgeArrays to_edge_arrays(const SparsifyResult& result);

/// Binding entry point: graph given as dense-id edges over [0, n).
struct SparsifyRequest {
  std::size_t n = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  std::string mode = "static";
  std::vector<double> coeffs;
  std::optional<unsigned> max_hop;
  SampleBudget budget = EcFactor{1.0};
  std::uint64_t seed = 0;
  std::vector<std::int64_t> start_set;
  bool add_self_loops = false;
  bool symmetrize = false;
  unsigned workers = 1;
};

EdgeArrays sparsify_edges(const SparsifyRequest& request);

}  // namespace lapsparse
