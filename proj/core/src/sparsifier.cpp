#include "lapsparse/sparsifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "lapsparse/error.hpp"
#include "lapsparse/rng.hpp"
#include "lapsparse/walk.hpp"
#include "parallel.hpp"

namespace lapsparse {

CoeffVector::CoeffVector(std::vector<double> w) : w_(std::move(w)) {
  if (w_.empty()) throw InvalidInput("coefficient vector is empty");
  bool any_nonzero = false;
  for (double x : w_) {
    if (!std::isfinite(x)) throw InvalidInput("coefficients must be finite");
    any_nonzero = any_nonzero || x != 0.0;
  }
  if (!any_nonzero) throw InvalidInput("coefficient vector is all zero");
}

double CoeffVector::sampled_l1() const noexcept {
  double s = 0.0;
  for (std::size_t k = 1; k < w_.size(); ++k) s += std::abs(w_[k]);
  return s;
}

bool CoeffVector::has_negative() const noexcept {
  return std::any_of(w_.begin(), w_.end(), [](double x) { return x < 0.0; });
}

CoeffVector CoeffVector::negated() const {
  std::vector<double> out(w_.size());
  std::transform(w_.begin(), w_.end(), out.begin(), [](double x) { return -x; });
  return CoeffVector(std::move(out));
}

std::string_view to_string(SamplingMode mode) noexcept {
  switch (mode) {
    case SamplingMode::kStatic: return "static";
    case SamplingMode::kLearnable: return "learnable";
    case SamplingMode::kNodeWise: return "nodewise";
  }
  return "unknown";
}

SamplingMode parse_mode(std::string_view text) {
  if (text == "static") return SamplingMode::kStatic;
  if (text == "learnable") return SamplingMode::kLearnable;
  if (text == "nodewise") return SamplingMode::kNodeWise;
  throw InvalidInput("unknown sampling mode \"" + std::string(text) +
                     "\" (expected static, learnable or nodewise)");
}

std::uint64_t samples_per_hop(const SampleBudget& budget, std::size_t population, std::size_t n) {
  if (const auto* count = std::get_if<SampleCount>(&budget)) {
    if (count->samples == 0) throw InvalidInput("sample budget must be at least 1");
    return count->samples;
  }
  const double ec = std::get<EcFactor>(budget).ec;
  if (!(ec > 0.0) || !std::isfinite(ec)) throw InvalidInput("ec factor must be positive");
  const double m = std::ceil(ec * static_cast<double>(population) * std::log(static_cast<double>(n)));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(m));
}

std::size_t HopPartitionedOperator::total_nnz() const noexcept {
  std::size_t total = 0;
  for (const auto& h : hops) total += h.nnz();
  return total;
}

namespace {

using PairKey = std::uint64_t;

constexpr PairKey make_key(NodeId u, NodeId v) noexcept {
  return (static_cast<PairKey>(u) << 32) | v;
}

using KeyedSums = std::vector<std::pair<PairKey, double>>;

// Per-worker hash accumulator of per-sample coefficients.
class PairAccumulator {
 public:
  void add(NodeId u, NodeId v, double coef) { sums_[make_key(u, v)] += coef; }

  KeyedSums sorted() && {
    KeyedSums out(sums_.begin(), sums_.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  }

 private:
  std::unordered_map<PairKey, double> sums_;
};

// Merges worker results in worker order so the sum for a key is always
// accumulated in the same sequence.
KeyedSums merge_workers(std::vector<KeyedSums> parts) {
  KeyedSums all;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  all.reserve(total);
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  KeyedSums merged;
  merged.reserve(all.size());
  for (const auto& [key, value] : all) {
    if (!merged.empty() && merged.back().first == key) {
      merged.back().second += value;
    } else {
      merged.emplace_back(key, value);
    }
  }
  return merged;
}

// Converts accumulated coefficients to entries weighted by
// coef * scale * d_u^-1/2 d_v^-1/2.
std::vector<Entry> to_entries(const Graph& g, const KeyedSums& sums, double scale) {
  const auto isd = g.inv_sqrt_degrees();
  std::vector<Entry> out;
  out.reserve(sums.size());
  for (const auto& [key, coef] : sums) {
    const auto u = static_cast<NodeId>(key >> 32);
    const auto v = static_cast<NodeId>(key & 0xffffffffULL);
    out.push_back({u, v, (coef * scale) * (isd[u] * isd[v])});
  }
  return out;
}

// Draws `total` samples split across workers. Each worker builds its own
// drawer with make_draw() and calls draw(rng, acc) on the stream
// derive_seed(seed, {stream, w}).
template <typename MakeDraw>
KeyedSums sample_parallel(std::uint64_t total, unsigned workers, std::uint64_t seed,
                          std::uint64_t stream, MakeDraw&& make_draw) {
  workers = std::max(1u, workers);
  std::vector<KeyedSums> parts(workers);
  detail::run_workers(workers, [&](unsigned w) {
    Rng rng(derive_seed(seed, {stream, w}));
    PairAccumulator acc;
    auto draw = make_draw();
    const std::uint64_t count = detail::share(total, workers, w);
    for (std::uint64_t i = 0; i < count; ++i) draw(rng, acc);
    parts[w] = std::move(acc).sorted();
  });
  return merge_workers(std::move(parts));
}

OperatorMeta base_meta(const Graph& g, unsigned max_hop, const SamplerConfig& cfg, SamplingMode mode) {
  OperatorMeta meta;
  meta.n = g.num_nodes();
  meta.max_hop = max_hop;
  meta.mode = mode;
  meta.seed = cfg.seed;
  meta.workers = std::max(1u, cfg.workers);
  meta.symmetrized = cfg.symmetrize;
  if (const auto* ec = std::get_if<EcFactor>(&cfg.budget)) meta.ec = ec->ec;
  return meta;
}

void require_mode(const SamplerConfig& cfg, SamplingMode expected) {
  if (cfg.mode != expected) {
    throw InvalidInput("sampler configured for mode " + std::string(to_string(cfg.mode)) +
                       ", expected " + std::string(to_string(expected)));
  }
}

SparseMatrix finish(std::size_t n, std::vector<Entry> entries, bool symmetrize) {
  SparseMatrix m = SparseMatrix::from_triplets(n, std::move(entries));
  return symmetrize ? symmetrized(m) : m;
}

}  // namespace

SparseOperator slsgc(const Graph& g, const CoeffVector& w, const SamplerConfig& cfg) {
  require_mode(cfg, SamplingMode::kStatic);
  const std::size_t n = g.num_nodes();
  const unsigned max_hop = w.max_hop();
  OperatorMeta meta = base_meta(g, max_hop, cfg, SamplingMode::kStatic);
  meta.signed_coefficients = w.has_negative();

  std::vector<Entry> entries;
  if (w[0] != 0.0) {
    entries.reserve(n);
    for (NodeId u = 0; u < n; ++u) entries.push_back({u, u, w[0]});
  }

  const double l1 = w.sampled_l1();
  if (max_hop >= 1 && l1 == 0.0) {
    meta.warnings.emplace_back("w_1..w_K are all zero; returning w_0 I without sampling");
  }
  if (max_hop == 0 || l1 == 0.0) {
    return {finish(n, std::move(entries), cfg.symmetrize), std::move(meta)};
  }

  std::uint64_t total = 0;
  if (std::holds_alternative<SampleCount>(cfg.budget)) {
    total = samples_per_hop(cfg.budget, n, n);
  } else {
    total = samples_per_hop(cfg.budget, n, n) * max_hop;
  }
  meta.budget_samples = total;
  meta.total_samples = total;

  std::vector<double> hop_weights(w.values().begin() + 1, w.values().end());
  for (double& x : hop_weights) x = std::abs(x);
  std::vector<double> signs(max_hop + 1, 0.0);
  for (unsigned k = 1; k <= max_hop; ++k) signs[k] = w[k] < 0.0 ? -1.0 : 1.0;

  const auto sums = sample_parallel(total, meta.workers, cfg.seed, 0, [&] {
    return [&, hop_dist = std::discrete_distribution<unsigned>(hop_weights.begin(), hop_weights.end())](
               Rng& rng, PairAccumulator& acc) mutable {
      const unsigned k = hop_dist(rng.engine()) + 1;
      const auto ep = sample_edge_k(g, k, rng);
      acc.add(ep.u, ep.v, signs[k]);
    };
  });

  const double scale = l1 * static_cast<double>(g.num_arcs()) / static_cast<double>(total);
  auto sampled = to_entries(g, sums, scale);
  entries.insert(entries.end(), sampled.begin(), sampled.end());
  return {finish(n, std::move(entries), cfg.symmetrize), std::move(meta)};
}

HopPartitionedOperator glsgc(const Graph& g, unsigned max_hop, const SamplerConfig& cfg) {
  require_mode(cfg, SamplingMode::kLearnable);
  const std::size_t n = g.num_nodes();
  HopPartitionedOperator out;
  out.meta = base_meta(g, max_hop, cfg, SamplingMode::kLearnable);
  out.hops.reserve(max_hop + 1);
  out.hops.push_back(SparseMatrix::identity(n));
  if (max_hop == 0) return out;

  const std::uint64_t per_hop = samples_per_hop(cfg.budget, n, n);
  out.meta.budget_samples = per_hop;
  out.meta.total_samples = per_hop * max_hop;
  const double scale = static_cast<double>(g.num_arcs()) / static_cast<double>(per_hop);

  for (unsigned k = 1; k <= max_hop; ++k) {
    const auto sums = sample_parallel(per_hop, out.meta.workers, cfg.seed, k, [&] {
      return [&](Rng& rng, PairAccumulator& acc) {
        const auto ep = sample_edge_k(g, k, rng);
        acc.add(ep.u, ep.v, 1.0);
      };
    });
    out.hops.push_back(finish(n, to_entries(g, sums, scale), cfg.symmetrize));
  }
  return out;
}

SparseOperator nodewise_sample(const Graph& g, const CoeffVector& w, std::span<const NodeId> start_set,
                               const SamplerConfig& cfg) {
  require_mode(cfg, SamplingMode::kNodeWise);
  if (start_set.empty()) throw InvalidInput("node-wise sampling needs a non-empty start set");
  const std::size_t n = g.num_nodes();
  std::vector<NodeId> starts(start_set.begin(), start_set.end());
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  if (starts.back() >= n) throw InvalidInput("start set references a node outside the graph");

  const unsigned max_hop = w.max_hop();
  SparseOperator out;
  out.meta = base_meta(g, max_hop, cfg, SamplingMode::kNodeWise);
  out.meta.signed_coefficients = w.has_negative();

  std::vector<Entry> entries;
  if (w[0] != 0.0) {
    for (NodeId u : starts) entries.push_back({u, u, w[0]});
  }

  std::vector<double> start_weights(starts.size());
  double volume = 0.0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    start_weights[i] = g.degree(starts[i]);
    volume += start_weights[i];
  }

  const std::uint64_t per_hop = max_hop > 0 ? samples_per_hop(cfg.budget, starts.size(), n) : 0;
  out.meta.budget_samples = per_hop;
  const double scale = volume / static_cast<double>(std::max<std::uint64_t>(per_hop, 1));

  for (unsigned k = 1; k <= max_hop; ++k) {
    if (w[k] == 0.0) continue;
    const double coef = w[k];
    const auto sums = sample_parallel(per_hop, out.meta.workers, cfg.seed, k, [&] {
      return [&, pick = std::discrete_distribution<std::size_t>(start_weights.begin(), start_weights.end())](
                 Rng& rng, PairAccumulator& acc) mutable {
        const NodeId u = starts[pick(rng.engine())];
        const NodeId v = sample_walk_from(g, u, k, rng);
        acc.add(u, v, coef);
      };
    });
    out.meta.total_samples += per_hop;
    auto sampled = to_entries(g, sums, scale);
    entries.insert(entries.end(), sampled.begin(), sampled.end());
  }
  out.matrix = finish(n, std::move(entries), cfg.symmetrize);
  return out;
}

SparseOperator collapse(const HopPartitionedOperator& op, const CoeffVector& w) {
  if (op.hops.empty()) throw InvalidInput("operator has no hop parts");
  if (w.values().size() != op.hops.size()) {
    throw InvalidInput("coefficient count " + std::to_string(w.values().size()) +
                       " does not match hop count " + std::to_string(op.hops.size()));
  }
  SparseMatrix acc(op.hops.front().dim());
  for (unsigned k = 0; k < op.hops.size(); ++k) {
    if (w[k] == 0.0) continue;
    acc = linear_combination(1.0, acc, w[k], op.hops[k]);
  }
  SparseOperator out{std::move(acc), op.meta};
  out.meta.signed_coefficients = w.has_negative();
  return out;
}

}  // namespace lapsparse
