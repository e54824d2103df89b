#include "lapsparse/walk.hpp"

#include "lapsparse/error.hpp"

namespace lapsparse {

SampledPathEndpoints sample_edge_k(const Graph& g, unsigned k, Rng& rng) {
  if (k == 0) throw InvalidInput("sample_edge_k requires k >= 1");
  const ArcIndex arc = rng.below(g.num_arcs());
  const auto split = static_cast<unsigned>(rng.below(k));
  const NodeId u = sample_walk_from(g, g.arc_source(arc), split, rng);
  const NodeId v = sample_walk_from(g, g.arc_target(arc), k - split - 1, rng);
  return {u, v, k};
}

}  // namespace lapsparse
