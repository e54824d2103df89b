#include "lapsparse/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <unordered_map>

#include "lapsparse/error.hpp"
#include "lapsparse/rng.hpp"

namespace lapsparse {

Graph Graph::from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges,
                        bool add_self_loops) {
  if (n == 0 || (edges.empty() && !add_self_loops)) throw InvalidInput("graph has no edges");
  if (n > std::numeric_limits<NodeId>::max()) throw InvalidInput("too many nodes");

  std::vector<std::pair<NodeId, NodeId>> arcs;
  arcs.reserve(2 * edges.size() + (add_self_loops ? n : 0));
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) {
      throw InvalidInput("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                         ") references a node outside [0, " + std::to_string(n) + ")");
    }
    arcs.emplace_back(u, v);
    if (u != v) arcs.emplace_back(v, u);
  }
  if (add_self_loops) {
    for (NodeId u = 0; u < n; ++u) arcs.emplace_back(u, u);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  Graph g;
  g.row_offsets_.assign(n + 1, 0);
  g.degrees_.assign(n, 0);
  g.neighbors_.reserve(arcs.size());
  g.arc_sources_.reserve(arcs.size());
  for (const auto& [u, v] : arcs) {
    ++g.degrees_[u];
    g.neighbors_.push_back(v);
    g.arc_sources_.push_back(u);
    if (u == v) ++g.num_self_loops_;
  }
  for (std::size_t u = 0; u < n; ++u) {
    if (g.degrees_[u] == 0) {
      throw InvalidInput("node " + std::to_string(u) + " is isolated");
    }
    g.row_offsets_[u + 1] = g.row_offsets_[u] + g.degrees_[u];
  }
  g.num_edges_ = (arcs.size() - g.num_self_loops_) / 2 + g.num_self_loops_;
  g.inv_sqrt_degrees_.resize(n);
  for (std::size_t u = 0; u < n; ++u) {
    g.inv_sqrt_degrees_[u] = 1.0 / std::sqrt(static_cast<double>(g.degrees_[u]));
  }
  return g;
}

std::vector<std::pair<NodeId, NodeId>> Graph::undirected_edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(num_edges_);
  for (ArcIndex a = 0; a < num_arcs(); ++a) {
    if (arc_sources_[a] <= neighbors_[a]) out.emplace_back(arc_sources_[a], neighbors_[a]);
  }
  return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

bool parse_int(std::string_view field, std::int64_t& out) {
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// Calls fn(line_number, fields) for every non-blank, non-comment line.
template <typename Fn>
void for_each_record(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    ++line_no;
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto fields = split_fields(line);
    if (fields.empty() || fields.front().starts_with('#')) continue;
    fn(line_no, fields);
  }
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

}  // namespace

LoadedGraph parse_edge_list(std::string_view text, bool add_self_loops, std::string_view source) {
  const std::string src(source);
  std::unordered_map<std::int64_t, NodeId> compact;
  std::vector<std::int64_t> raw_ids;
  std::vector<std::pair<NodeId, NodeId>> edges;

  auto intern = [&](std::int64_t raw) {
    auto [it, inserted] = compact.try_emplace(raw, static_cast<NodeId>(raw_ids.size()));
    if (inserted) raw_ids.push_back(raw);
    return it->second;
  };

  for_each_record(text, [&](std::size_t line, const std::vector<std::string_view>& fields) {
    if (fields.size() != 2) {
      throw ParseError(src, line,
                       fields.size() > 2 ? "expected \"u v\"; weighted edge lists are not supported"
                                         : "expected \"u v\"");
    }
    std::int64_t u = 0;
    std::int64_t v = 0;
    if (!parse_int(fields[0], u) || !parse_int(fields[1], v)) {
      throw ParseError(src, line, "node ids must be integers");
    }
    const NodeId cu = intern(u);
    const NodeId cv = intern(v);
    edges.emplace_back(cu, cv);
  });

  if (edges.empty()) throw InvalidInput(src + ": graph has no edges");
  return {Graph::from_edges(raw_ids.size(), edges, add_self_loops), std::move(raw_ids)};
}

LoadedGraph load_graph(const std::filesystem::path& path, bool add_self_loops) {
  return parse_edge_list(slurp(path), add_self_loops, path.string());
}

LabelMap load_labels(const std::filesystem::path& path, std::span<const std::int64_t> raw_ids) {
  std::unordered_map<std::int64_t, NodeId> compact;
  for (std::size_t c = 0; c < raw_ids.size(); ++c) compact.emplace(raw_ids[c], static_cast<NodeId>(c));

  constexpr std::int64_t kUnset = -1;
  LabelMap map{std::vector<std::int64_t>(raw_ids.size(), kUnset)};
  const std::string text = slurp(path);
  for_each_record(text, [&](std::size_t line, const std::vector<std::string_view>& fields) {
    std::int64_t raw = 0;
    std::int64_t label = 0;
    if (fields.size() != 2 || !parse_int(fields[0], raw) || !parse_int(fields[1], label)) {
      throw ParseError(path.string(), line, "expected \"node label\" integers");
    }
    if (label < 0) throw ParseError(path.string(), line, "labels must be non-negative");
    auto it = compact.find(raw);
    if (it == compact.end()) throw ParseError(path.string(), line, "unknown node " + std::string(fields[0]));
    if (map.labels[it->second] != kUnset) {
      throw ParseError(path.string(), line, "duplicate label for node " + std::string(fields[0]));
    }
    map.labels[it->second] = label;
  });
  for (std::size_t c = 0; c < raw_ids.size(); ++c) {
    if (map.labels[c] == kUnset) {
      throw InvalidInput(path.string() + ": node " + std::to_string(raw_ids[c]) + " has no label");
    }
  }
  return map;
}

double edge_homophily(const Graph& g, const LabelMap& labels) {
  if (labels.labels.size() != g.num_nodes()) {
    throw InvalidInput("label count " + std::to_string(labels.labels.size()) +
                       " does not match node count " + std::to_string(g.num_nodes()));
  }
  std::size_t same = 0;
  std::size_t total = 0;
  for (const auto& [u, v] : g.undirected_edges()) {
    if (u == v) continue;
    ++total;
    if (labels.labels[u] == labels.labels[v]) ++same;
  }
  if (total == 0) throw InvalidInput("graph has no edges between distinct nodes");
  return static_cast<double>(same) / static_cast<double>(total);
}

Graph random_graph(std::size_t n, double mean_degree, std::uint64_t seed, bool add_self_loops) {
  if (n < 2) throw InvalidInput("random_graph needs at least two nodes");
  if (!(mean_degree > 0.0)) throw InvalidInput("mean degree must be positive");
  const double p = std::min(1.0, mean_degree / static_cast<double>(n - 1));
  Rng rng(derive_seed(seed, {0x67726170ULL}));

  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<bool> touched(n, false);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.uniform01() < p) {
        edges.emplace_back(u, v);
        touched[u] = touched[v] = true;
      }
    }
  }
  if (!add_self_loops) {
    for (NodeId u = 0; u < n; ++u) {
      if (touched[u]) continue;
      auto v = static_cast<NodeId>(rng.below(n - 1));
      if (v >= u) ++v;
      edges.emplace_back(u, v);
      touched[u] = touched[v] = true;
    }
  }
  return Graph::from_edges(n, edges, add_self_loops);
}

}  // namespace lapsparse
