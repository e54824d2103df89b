#include "lapsparse/api.hpp"

#include "lapsparse/error.hpp"

namespace lapsparse {

SparsifyResult sparsify(const Graph& g, const SparsifyOptions& options) {
  const SamplerConfig& cfg = options.sampler;
  switch (cfg.mode) {
    case SamplingMode::kStatic:
      if (!options.coeffs) throw InvalidInput("static mode needs coefficients");
      return slsgc(g, *options.coeffs, cfg);
    case SamplingMode::kLearnable: {
      unsigned max_hop = 0;
      if (options.max_hop) {
        max_hop = *options.max_hop;
        if (options.coeffs && options.coeffs->max_hop() != max_hop) {
          throw InvalidInput("K disagrees with the coefficient count");
        }
      } else if (options.coeffs) {
        max_hop = options.coeffs->max_hop();
      } else {
        throw InvalidInput("learnable mode needs K or coefficients");
      }
      return glsgc(g, max_hop, cfg);
    }
    case SamplingMode::kNodeWise:
      if (!options.coeffs) throw InvalidInput("node-wise mode needs coefficients");
      if (options.start_set.empty()) throw InvalidInput("node-wise mode needs a start set");
      return nodewise_sample(g, *options.coeffs, options.start_set, cfg);
  }
  throw InvalidInput("unknown sampling mode");
}

const OperatorMeta& meta_of(const SparsifyResult& result) noexcept {
  return std::visit([](const auto& op) -> const OperatorMeta& { return op.meta; }, result);
}

namespace {

void append(EdgeArrays& out, const SparseMatrix& m, std::optional<std::int32_t> hop) {
  for (const Entry& e : m.entries()) {
    out.src.push_back(e.row);
    out.dst.push_back(e.col);
    out.weight.push_back(e.weight);
    if (hop) out.hop.push_back(*hop);
  }
}

}  // namespace

EdgeArrays to_edge_arrays(const SparsifyResult& result) {
  EdgeArrays out;
  if (const auto* op = std::get_if<SparseOperator>(&result)) {
    append(out, op->matrix, std::nullopt);
  } else {
    const auto& parts = std::get<HopPartitionedOperator>(result);
    for (std::size_t k = 0; k < parts.hops.size(); ++k) append(out, parts.hops[k], static_cast<std::int32_t>(k));
  }
  return out;
}

EdgeArrays sparsify_edges(const SparsifyRequest& request) {
  auto to_node = [&](std::int64_t id) {
    if (id < 0 || static_cast<std::uint64_t>(id) >= request.n) {
      throw InvalidInput("node id " + std::to_string(id) + " outside [0, " + std::to_string(request.n) + ")");
    }
    return static_cast<NodeId>(id);
  };
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(request.edges.size());
  for (const auto& [u, v] : request.edges) edges.emplace_back(to_node(u), to_node(v));

  SparsifyOptions options;
  options.sampler.mode = parse_mode(request.mode);
  options.sampler.budget = request.budget;
  options.sampler.seed = request.seed;
  options.sampler.workers = request.workers;
  options.sampler.symmetrize = request.symmetrize;
  if (!request.coeffs.empty()) options.coeffs = CoeffVector(request.coeffs);
  options.max_hop = request.max_hop;
  for (std::int64_t s : request.start_set) options.start_set.push_back(to_node(s));

  const Graph g = Graph::from_edges(request.n, edges, request.add_self_loops);
  return to_edge_arrays(sparsify(g, options));
}

}  // namespace lapsparse
