#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace lapsparse {

using NodeId = std::uint32_t;
using ArcIndex = std::uint64_t;

/// Immutable undirected, unweighted graph in CSR form.
///
/// Every undirected edge {u, v} with u != v is stored as the two arcs (u, v)
/// and (v, u). A self-loop is stored as a single arc (u, u) and contributes 1
/// to the degree of u, so that degree(u) == row length == sum_j A(u, j).
/// Neighbor lists are sorted ascending. Every node has degree >= 1.
class Graph {
 public:
  /// Builds a graph over the dense id range [0, n). Duplicate and mirrored
  /// edges are collapsed. With `add_self_loops`, every node ends up with
  /// exactly one self-loop. Throws InvalidInput for ids >= n, an empty edge
  /// set, or a node that is left isolated.
  static Graph from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges,
                          bool add_self_loops);

  std::size_t num_nodes() const noexcept { return degrees_.size(); }
  /// Undirected edges, self-loops counted once each.
  std::size_t num_edges() const noexcept { return num_edges_; }
  std::size_t num_self_loops() const noexcept { return num_self_loops_; }
  /// Total arc count, equal to the sum of degrees (the graph volume).
  ArcIndex num_arcs() const noexcept { return neighbors_.size(); }
  bool has_self_loops() const noexcept { return num_self_loops_ > 0; }

  std::uint32_t degree(NodeId u) const noexcept { return degrees_[u]; }
  std::span<const NodeId> neighbors(NodeId u) const noexcept {
    return {neighbors_.data() + row_offsets_[u], neighbors_.data() + row_offsets_[u + 1]};
  }
  /// Source node of arc `a` (row index of the CSR position).
  NodeId arc_source(ArcIndex a) const noexcept { return arc_sources_[a]; }
  NodeId arc_target(ArcIndex a) const noexcept { return neighbors_[a]; }

  std::span<const ArcIndex> row_offsets() const noexcept { return row_offsets_; }
  std::span<const NodeId> adjacency() const noexcept { return neighbors_; }
  std::span<const std::uint32_t> degrees() const noexcept { return degrees_; }
  /// Precomputed d_u^{-1/2} for every node.
  std::span<const double> inv_sqrt_degrees() const noexcept { return inv_sqrt_degrees_; }

  /// Undirected edges as (u, v) with u <= v, in CSR order.
  std::vector<std::pair<NodeId, NodeId>> undirected_edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  Graph() = default;

  std::vector<ArcIndex> row_offsets_;
  std::vector<NodeId> neighbors_;
  std::vector<NodeId> arc_sources_;
  std::vector<std::uint32_t> degrees_;
  std::vector<double> inv_sqrt_degrees_;
  std::size_t num_edges_ = 0;
  std::size_t num_self_loops_ = 0;
};

/// Graph loaded from a file together with the raw-id map produced by
/// compaction. `raw_ids[c]` is the raw id of compact node c.
struct LoadedGraph {
  Graph graph;
  std::vector<std::int64_t> raw_ids;
};

/// Reads a whitespace-separated "u v" edge list. Blank lines and lines
/// starting with '#' are skipped. Raw ids are compacted to 0..n-1 in order of
/// first appearance. A third column (edge weight) is rejected.
LoadedGraph load_graph(const std::filesystem::path& path, bool add_self_loops);

/// Same as load_graph, reading from an in-memory buffer; `source` names the
/// input in error messages.
LoadedGraph parse_edge_list(std::string_view text, bool add_self_loops,
                            std::string_view source = "<memory>");

/// Per-node class labels, indexed by compact node id.
struct LabelMap {
  std::vector<std::int64_t> labels;
};

/// Reads "raw_id label" lines and maps them through `raw_ids`. Every node of
/// the graph must receive exactly one label.
LabelMap load_labels(const std::filesystem::path& path, std::span<const std::int64_t> raw_ids);

/// Fraction of undirected non-self-loop edges whose endpoints share a label.
double edge_homophily(const Graph& g, const LabelMap& labels);

inline double degree_sqrt_inv(const Graph& g, NodeId u) noexcept {
  return g.inv_sqrt_degrees()[u];
}

/// Erdős–Rényi style G(n, p) graph with p = mean_degree / (n - 1). Nodes
/// that would be isolated are attached to a uniformly chosen other node
/// (unless self-loops are added, which already gives them degree 1).
Graph random_graph(std::size_t n, double mean_degree, std::uint64_t seed, bool add_self_loops);

}  // namespace lapsparse
