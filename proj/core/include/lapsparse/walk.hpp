#pragma once

#include "lapsparse/graph.hpp"
#include "lapsparse/rng.hpp"

namespace lapsparse {

/// Endpoints of one sampled length-k path.
struct SampledPathEndpoints {
  NodeId u;
  NodeId v;
  unsigned k;

  friend bool operator==(const SampledPathEndpoints&, const SampledPathEndpoints&) = default;
};

/// Ends a k-step uniform random walk started at `start`. k == 0 returns start.
inline NodeId sample_walk_from(const Graph& g, NodeId start, unsigned k, Rng& rng) {
  const auto offsets = g.row_offsets();
  const auto adj = g.adjacency();
  NodeId cur = start;
  for (unsigned step = 0; step < k; ++step) {
    const ArcIndex begin = offsets[cur];
    const ArcIndex len = offsets[cur + 1] - begin;
    cur = adj[begin + rng.below(len)];
  }
  return cur;
}

/// Draws one entry of D (D^-1 A)^k: picks an arc uniformly among all arcs,
/// splits a length-k path at it (position i uniform in [0, k-1]) and extends
/// i steps from the arc's source and k-i-1 steps from its target.
///
/// A concrete path p = (u_0, ..., u_k) is produced with probability
/// w(p) / vol where w(p) = 1 / prod_{interior j} d_{u_j} and vol is the arc
/// count, so Pr[(u, v)] = (D (D^-1 A)^k)_{uv} / vol.
///
/// Requires k >= 1.
SampledPathEndpoints sample_edge_k(const Graph& g, unsigned k, Rng& rng);

}  // namespace lapsparse
