// Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "cli.hpp"
#include "lapsparse/api.hpp"
#include "lapsparse/io.hpp"
#include "lapsparse/oracle.hpp"
#include "lapsparse/propagation.hpp"
#include "lapsparse/rng.hpp"
#include "support/graphs.hpp"
#include "support/temp_dir.hpp"

namespace lapsparse {
namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v, int precision = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

Signal gaussian_signal(std::size_t n, Eigen::Index channels, std::uint64_t seed) {
  Rng rng(seed);
  Signal x(static_cast<Eigen::Index>(n), channels);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

SamplerConfig config(SamplingMode mode, SampleBudget budget, std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.mode = mode;
  cfg.budget = budget;
  cfg.seed = seed;
  return cfg;
}

// Every sparsifier run in the suite goes through this guard, which checks the
// nnz bound against the number of samples the run was allowed to draw.
class BudgetGuard {
 public:
  SparseOperator slsgc_checked(const Graph& g, const CoeffVector& w, const SamplerConfig& cfg) {
    SparseOperator op = slsgc(g, w, cfg);
    std::uint64_t allowed = 0;
    if (const auto* count = std::get_if<SampleCount>(&cfg.budget)) {
      allowed = count->samples;
    } else {
      allowed = samples_per_hop(cfg.budget, g.num_nodes(), g.num_nodes()) * w.max_hop();
    }
    record(op.matrix.nnz(), allowed, g.num_nodes());
    return op;
  }

  HopPartitionedOperator glsgc_checked(const Graph& g, unsigned max_hop, const SamplerConfig& cfg) {
    HopPartitionedOperator op = glsgc(g, max_hop, cfg);
    record(op.total_nnz(), samples_per_hop(cfg.budget, g.num_nodes(), g.num_nodes()) * max_hop, g.num_nodes());
    return op;
  }

  SparseOperator nodewise_checked(const Graph& g, const CoeffVector& w, std::span<const NodeId> starts,
                                  const SamplerConfig& cfg) {
    SparseOperator op = nodewise_sample(g, w, starts, cfg);
    unsigned hops = 0;
    for (unsigned k = 1; k <= w.max_hop(); ++k) hops += w[k] != 0.0;
    record(op.matrix.nnz(), samples_per_hop(cfg.budget, starts.size(), g.num_nodes()) * hops, g.num_nodes());
    return op;
  }

  std::size_t runs() const noexcept { return runs_; }
  std::size_t violations() const noexcept { return violations_; }
  double worst_fill() const noexcept { return worst_fill_; }

 private:
  void record(std::size_t nnz, std::uint64_t samples, std::size_t n) {
    ++runs_;
    const double bound = static_cast<double>(samples + n);
    if (static_cast<double>(nnz) > bound) ++violations_;
    worst_fill_ = std::max(worst_fill_, static_cast<double>(nnz) / bound);
  }

  std::size_t runs_ = 0;
  std::size_t violations_ = 0;
  double worst_fill_ = 0.0;
};

BudgetGuard guard;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  const auto start = Clock::now();
  Outcome out;
  try {
    out = check();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!out.pass) ++failures;
  std::cout << (out.pass ? "PASS " : "FAIL ") << name << ": " << out.detail << " [" << fmt(secs, 3) << " s]"
            << std::endl;
}

// ---------------------------------------------------------------------------

Outcome unbiasedness_suite() {
  struct Case {
    std::string name;
    Graph g;
  };
  const std::vector<Case> graphs = {{"K3", testing::k3()},
                                    {"path3", testing::path3()},
                                    {"random10", random_graph(10, 3.0, 2024, false)},
                                    {"star5", testing::star(5)}};
  const unsigned trials = 200;
  const std::uint64_t samples = 10000;
  const auto start = Clock::now();
  std::size_t entries = 0;
  std::size_t within = 0;
  std::size_t zero_var_mismatch = 0;
  std::vector<std::string> failed;
  double worst_fraction = 1.0;

  for (std::uint64_t ci = 0; ci < graphs.size(); ++ci) {
    const Case& c = graphs[ci];
    const Graph& g = c.g;
    const auto n = static_cast<Eigen::Index>(g.num_nodes());

    const CoeffVector w_static({0.0, 0.0, 1.0});
    const std::vector<Eigen::MatrixXd> static_exact{dense_poly(g, w_static).values};
    const TrialEstimator static_est = [&](std::uint64_t s) {
      return std::vector<Eigen::MatrixXd>{
          to_dense(guard.slsgc_checked(g, w_static, config(SamplingMode::kStatic, SampleCount{samples}, s)).matrix)};
    };

    std::vector<Eigen::MatrixXd> learn_exact{Eigen::MatrixXd::Identity(n, n)};
    const Eigen::MatrixXd p = dense_normalized_adjacency(g).values;
    learn_exact.push_back(p);
    learn_exact.push_back(p * p);
    const TrialEstimator learn_est = [&](std::uint64_t s) {
      const auto op = guard.glsgc_checked(g, 2, config(SamplingMode::kLearnable, SampleCount{samples}, s));
      std::vector<Eigen::MatrixXd> parts;
      for (const auto& h : op.hops) parts.push_back(to_dense(h));
      return parts;
    };

    const CoeffVector w_node({0.0, 1.0, 0.5});
    const std::vector<NodeId> starts{static_cast<NodeId>(g.num_nodes() - 1)};
    Eigen::MatrixXd node_exact = Eigen::MatrixXd::Zero(n, n);
    node_exact.row(starts[0]) = dense_poly(g, w_node).values.row(starts[0]);
    const std::vector<Eigen::MatrixXd> node_exact_parts{node_exact};
    const TrialEstimator node_est = [&](std::uint64_t s) {
      return std::vector<Eigen::MatrixXd>{to_dense(
          guard.nodewise_checked(g, w_node, starts, config(SamplingMode::kNodeWise, SampleCount{samples}, s)).matrix)};
    };

    const std::vector<std::tuple<std::string, std::span<const Eigen::MatrixXd>, const TrialEstimator*>> regimes = {
        {"static", static_exact, &static_est}, {"learnable", learn_exact, &learn_est},
        {"nodewise", node_exact_parts, &node_est}};
    std::uint64_t stream = 0;
    for (const auto& [regime, exact, est] : regimes) {
      const ZScoreTable t = unbiasedness_test(exact, *est, trials, derive_seed(31, {ci, ++stream}));
      entries += t.entries.size();
      within += t.within_3sigma;
      zero_var_mismatch += t.zero_variance_mismatches;
      worst_fraction = std::min(worst_fraction, t.fraction_within_3sigma());
      if (!t.passed(0.99)) failed.push_back(c.name + "/" + regime);
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::string detail = "12 cases, T=" + std::to_string(trials) + ", M=" + std::to_string(samples) + "; " +
                       std::to_string(within) + "/" + std::to_string(entries) +
                       " entries within 3 sigma, worst case " + fmt(100 * worst_fraction, 4) +
                       "%, zero-variance mismatches " + std::to_string(zero_var_mismatch) + ", runtime " +
                       fmt(secs, 3) + " s (limit 60)";
  if (!failed.empty()) {
    detail += "; failing:";
    for (const auto& f : failed) detail += " " + f;
  }
  return {failed.empty() && zero_var_mismatch == 0 && secs < 60.0, detail};
}

Outcome oracle_identities() {
  double worst_row = 0.0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Graph g = random_graph(20 + 16 * seed, 2.0 + static_cast<double>(seed), seed, seed % 2 == 1);
    for (unsigned k = 0; k <= 6; ++k) {
      const Eigen::MatrixXd m = dense_rw_poly(g, k).values;
      for (NodeId u = 0; u < g.num_nodes(); ++u) {
        worst_row = std::max(worst_row, std::abs(m.row(u).sum() - g.degree(u)));
      }
    }
  }

  double worst_sum = 0.0;
  const double alphas[] = {0.05, 0.1, 0.2, 0.5, 0.9};
  const unsigned ks[] = {1, 2, 5, 10};
  for (double a : alphas) {
    for (unsigned k : ks) {
      const CoeffVector w = appnp_coeffs(a, k);
      double s = 0.0;
      for (double v : w.values()) s += v;
      worst_sum = std::max(worst_sum, std::abs(s - 1.0));
    }
  }

  double worst_rel = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = random_graph(100, 3.0 + static_cast<double>(seed), 100 + seed, seed % 2 == 0);
    Rng rng(seed);
    std::vector<double> w(6);
    for (double& v : w) v = rng.normal();
    const CoeffVector coeffs(w);
    const Signal x = gaussian_signal(100, 4, seed);
    const Eigen::MatrixXd dense = dense_poly(g, coeffs).values * Eigen::MatrixXd(x);
    const Eigen::MatrixXd fast = exact_k_round(g, coeffs, x);
    worst_rel = std::max(worst_rel, (fast - dense).norm() / dense.norm());
  }
  const bool ok = worst_row <= 1e-12 && worst_sum <= 1e-15 && worst_rel <= 1e-10;
  return {ok, "max |row sum - degree| " + fmt(worst_row) + " (k<=6), max |sum appnp_coeffs - 1| " + fmt(worst_sum) +
                  " over 20 (alpha,K), exact_k_round vs dense rel " + fmt(worst_rel) + " on n=100"};
}

Outcome monte_carlo_rate() {
  const Graph g = random_graph(100, 8.0, 7, false);
  const CoeffVector w({0.1, 0.09, 0.81});
  const Eigen::MatrixXd exact = dense_poly(g, w).values;
  const unsigned trials = 20;
  std::vector<double> medians;
  for (unsigned level = 0; level <= 4; ++level) {
    const std::uint64_t m = 2000ULL << level;
    std::vector<double> errs;
    for (unsigned t = 0; t < trials; ++t) {
      const auto parts =
          guard.glsgc_checked(g, 2, config(SamplingMode::kLearnable, SampleCount{m}, derive_seed(5, {level, t})));
      errs.push_back((to_dense(collapse(parts, w).matrix) - exact).norm());
    }
    medians.push_back(median(errs));
  }
  bool ok = true;
  std::string ratios;
  for (std::size_t i = 1; i < medians.size(); ++i) {
    const double r = medians[i - 1] / medians[i];
    ok = ok && r >= 1.2 && r <= 1.7;
    ratios += (i > 1 ? ", " : "") + fmt(r);
  }
  return {ok, "median Frobenius error ratios per doubling of M (2000..32000 per hop): " + ratios +
                  " (allowed [1.2, 1.7])"};
}

// max |approx - exact| over the hop >= 1 part of the collapsed estimator.
DiffHeatmap hop_tail_diff(const HopPartitionedOperator& parts, const CoeffVector& w, const DenseOperator& tail_exact) {
  std::vector<double> tail(w.values().begin(), w.values().end());
  tail[0] = 0.0;
  HopPartitionedOperator no_hop0 = parts;
  no_hop0.hops[0] = SparseMatrix(parts.hops[0].dim());
  return diff_heatmap(tail_exact, collapse(no_hop0, CoeffVector(tail)).matrix);
}

Outcome budget_sweep(const std::filesystem::path& scratch) {
  const Graph g = random_graph(180, 3.3, 4, true);
  const CoeffVector w({1.0, -0.5, 0.25});
  const DenseOperator tail_exact = dense_poly(g, CoeffVector({0.0, -0.5, 0.25}));
  const double ecs[] = {0.1, 1.0, 10.0};
  const unsigned trials = 20;
  unsigned decreasing = 0;
  std::vector<std::vector<double>> per_ec(3);
  bool clipped = true;
  for (unsigned t = 0; t < trials; ++t) {
    double prev = std::numeric_limits<double>::infinity();
    bool strict = true;
    for (unsigned i = 0; i < 3; ++i) {
      const auto parts = guard.glsgc_checked(
          g, 2, config(SamplingMode::kLearnable, EcFactor{ecs[i]}, derive_seed(6, {t, i})));
      const DiffHeatmap heat = hop_tail_diff(parts, w, tail_exact);
      per_ec[i].push_back(heat.max_abs_diff);
      strict = strict && heat.max_abs_diff < prev;
      prev = heat.max_abs_diff;
      if (t == 0) {
        const auto path = scratch / ("fig2.ec" + format_double(ecs[i]) + ".tsv");
        write_diff_tsv(path, heat);
        std::istringstream rows(read_text(path));
        std::string line;
        std::getline(rows, line);
        clipped = clipped && line == "u\tv\tdiff" && heat.clip == 0.5;
        while (std::getline(rows, line)) clipped = clipped && std::abs(std::stod(line.substr(line.rfind('\t') + 1))) <= 0.5;
      }
    }
    decreasing += strict;
  }
  const double m0 = median(per_ec[0]);
  const double m1 = median(per_ec[1]);
  const double m2 = median(per_ec[2]);
  const bool ok = decreasing >= 18 && m0 > m1 && m1 > m2 && clipped;
  return {ok, "n=180, median max|diff| excluding hop 0 at ec 0.1/1/10: " + fmt(m0) + " / " + fmt(m1) + " / " +
                  fmt(m2) + ", strictly decreasing in " + std::to_string(decreasing) +
                  "/20 paired trials (need 18), diff TSV within [-0.5, 0.5]: " + (clipped ? "yes" : "no")};
}

Outcome loss_scaling() {
  const Graph g = random_graph(100, 8.0, 9, true);
  const double alpha = 0.1;
  const unsigned k = 5;
  const Signal x = gaussian_signal(100, 8, 12);

  auto rel_err = [&](const SampleBudget& budget, std::uint64_t seed) {
    const SamplerConfig cfg = config(SamplingMode::kStatic, budget, seed);
    guard.slsgc_checked(g, appnp_coeffs(alpha, k), cfg);
    return loss_error_experiment(g, x, alpha, k, cfg).rel_err;
  };

  unsigned better = 0;
  for (unsigned t = 0; t < 20; ++t) {
    const double lo = rel_err(EcFactor{0.1}, derive_seed(8, {t, 0}));
    const double hi = rel_err(EcFactor{10.0}, derive_seed(8, {t, 1}));
    better += hi < lo;
  }

  // Over this budget range the second-order term of the loss dominates, so
  // rel_err falls like 1/M and the true ratio sits just under 2. A median of
  // 400 draws still carries a few percent of noise, so each ratio is judged
  // against the interval widened by two bootstrap standard errors.
  const unsigned draws = 400;
  std::vector<double> log_medians;
  std::vector<double> log_se;
  Rng boot(derive_seed(10, {}));
  for (unsigned level = 0; level <= 4; ++level) {
    std::vector<double> errs;
    for (unsigned t = 0; t < draws; ++t) errs.push_back(rel_err(SampleCount{2000ULL << level}, derive_seed(9, {level, t})));
    log_medians.push_back(std::log(median(errs)));
    std::vector<double> resampled(errs.size());
    double sum = 0.0, sum_sq = 0.0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
      for (double& e : resampled) e = errs[boot.below(errs.size())];
      const double m = std::log(median(resampled));
      sum += m;
      sum_sq += m * m;
    }
    log_se.push_back(std::sqrt(std::max(0.0, (sum_sq - sum * sum / reps) / (reps - 1))));
  }
  bool ratios_ok = true;
  unsigned strict = 0;
  std::string ratios;
  for (std::size_t i = 1; i < log_medians.size(); ++i) {
    const double log_r = log_medians[i - 1] - log_medians[i];
    const double se = std::hypot(log_se[i - 1], log_se[i]);
    const double r = std::exp(log_r);
    strict += r >= 1.2 && r <= 2.0;
    ratios_ok = ratios_ok && log_r + 2 * se >= std::log(1.2) && log_r - 2 * se <= std::log(2.0);
    ratios += (i > 1 ? ", " : "") + fmt(r) + " (x/" + fmt(std::exp(se), 3) + ")";
  }
  return {better >= 18 && ratios_ok,
          "alpha=0.1, K=5, n=100: ec=10 beats ec=0.1 in " + std::to_string(better) +
              "/20 paired trials (need 18); median rel_err ratios per doubling of M (2000..32000, 400 draws each, "
              "bootstrap se): " +
              ratios + "; inside [1.2, 2.0] outright for " + std::to_string(strict) +
              "/4, all within 2 se of it: " + (ratios_ok ? "yes" : "no")};
}

Outcome budget_bound() {
  // Extra runs across modes and budgets on top of everything recorded so far.
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Graph g = random_graph(60 + 10 * seed, 4.0, seed, seed % 2 == 0);
    const CoeffVector w({0.2, 0.3, 0.1, 0.4});
    guard.slsgc_checked(g, w, config(SamplingMode::kStatic, SampleCount{50 + 400 * seed}, seed));
    guard.slsgc_checked(g, w, config(SamplingMode::kStatic, EcFactor{0.05 * static_cast<double>(seed + 1)}, seed));
    guard.glsgc_checked(g, 3, config(SamplingMode::kLearnable, EcFactor{0.1 * static_cast<double>(seed + 1)}, seed));
    const std::vector<NodeId> starts{0, static_cast<NodeId>(seed + 1)};
    guard.nodewise_checked(g, w, starts, config(SamplingMode::kNodeWise, SampleCount{30 * (seed + 1)}, seed));
  }
  return {guard.violations() == 0, std::to_string(guard.runs()) + " sparsifier runs checked, " +
                                       std::to_string(guard.violations()) + " violations, max nnz/(M+n) " +
                                       fmt(guard.worst_fill())};
}

// ---------------------------------------------------------------------------
// Determinism over the command-line surface

int run_cli(const std::vector<std::string>& args) {
  std::ostringstream sink;
  auto* old = std::cout.rdbuf(sink.rdbuf());
  const int code = cli::run(args);
  std::cout.rdbuf(old);
  return code;
}

// Bench rows with the two timing columns blanked.
std::string strip_timings(const std::string& tsv) {
  std::istringstream in(tsv);
  std::ostringstream out;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, '\t');) cols.push_back(c);
    if (cols.size() == 7) cols[4] = cols[5] = "-";
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "\t" : "") << cols[i];
    out << '\n';
  }
  return out.str();
}

std::string strip_wall_time(const std::string& json_text) {
  auto j = nlohmann::json::parse(json_text);
  j.erase("wall_time_seconds");
  return j.dump();
}

Outcome determinism(const testing::TempDir& dir) {
  const std::string d = dir.path().string() + "/";
  const std::string graph = d + "g.tsv";
  if (run_cli({"generate", "--nodes", "80", "--mean-degree", "5", "--seed", "3", "--output", graph}) != 0) {
    return {false, "generate failed"};
  }
  dir.write("k3.tsv", "0 1\n1 2\n0 2\n");
  dir.write("start.txt", "3\n17\n");
  dir.write("labels.txt", [] {
    std::string s;
    for (int u = 0; u < 80; ++u) s += std::to_string(u) + " " + std::to_string(u % 3) + "\n";
    return s;
  }());

  struct Command {
    std::string name;
    std::vector<std::string> args;
    std::vector<std::string> outputs;
  };
  auto common = [](std::vector<std::string> a) {
    a.insert(a.end(), {"--seed", "42", "--workers", "1"});
    return a;
  };
  std::vector<std::string> learn_outputs;
  for (int k = 0; k <= 3; ++k) learn_outputs.push_back(d + "l.tsv.hop" + std::to_string(k));
  learn_outputs.insert(learn_outputs.end(), {d + "l.tsv.json", d + "l.tsv.manifest.json"});

  const std::vector<Command> commands = {
      {"generate", {"generate", "--nodes", "50", "--seed", "9", "--output", d + "gen.tsv"}, {d + "gen.tsv"}},
      {"sparsify static",
       common({"sparsify", "--input", graph, "--coeffs", "0.1,0.2,0.7", "--ec", "1", "--symmetrize", "--output",
               d + "s.tsv"}),
       {d + "s.tsv", d + "s.tsv.ids.tsv", d + "s.tsv.json", d + "s.tsv.manifest.json"}},
      {"sparsify learnable",
       common({"sparsify", "--input", graph, "--mode", "learnable", "--appnp-alpha", "0.2", "--K", "3", "--samples",
               "900", "--add-self-loops", "--output", d + "l.tsv"}),
       learn_outputs},
      {"sparsify nodewise",
       common({"sparsify", "--input", graph, "--mode", "nodewise", "--coeffs", "0.3,0.3,0.4", "--samples", "400",
               "--start-set", d + "start.txt", "--output", d + "n.tsv"}),
       {d + "n.tsv", d + "n.tsv.manifest.json"}},
      {"verify",
       common({"verify", "--input", d + "k3.tsv", "--coeffs", "1,-0.5,0.25", "--mode", "learnable", "--trials", "30",
               "--samples", "500", "--ec-sweep", "0.1,1,10", "--diff-prefix", d + "diff", "--output", d + "v.json"}),
       {d + "v.json", d + "diff.ec0.1.tsv", d + "diff.ec1.tsv", d + "diff.ec10.tsv", d + "v.json.manifest.json"}},
      {"appnp-check",
       common({"appnp-check", "--input", graph, "--alpha", "0.1", "--K", "5", "--ec", "1", "--trials", "3",
               "--output", d + "a.json"}),
       {d + "a.json", d + "a.json.manifest.json"}},
      {"bench",
       common({"bench", "--input", graph, "--K", "2,4", "--samples", "500,1000", "--repeats", "1", "--output",
               d + "b.tsv"}),
       {d + "b.tsv"}},
  };

  auto snapshot = [](const Command& c) {
    std::vector<std::string> contents;
    for (const auto& path : c.outputs) {
      std::string text = read_text(path);
      if (path.ends_with("manifest.json")) text = strip_wall_time(text);
      if (c.name == "bench") text = strip_timings(text);
      contents.push_back(std::move(text));
    }
    return contents;
  };

  std::vector<std::string> mismatched;
  std::size_t files = 0;
  for (const Command& c : commands) {
    if (run_cli(c.args) != 0) {
      mismatched.push_back(c.name + " (non-zero exit)");
      continue;
    }
    const auto first = snapshot(c);
    for (const auto& path : c.outputs) std::filesystem::remove(path);
    if (run_cli(c.args) != 0) {
      mismatched.push_back(c.name + " (non-zero exit on rerun)");
      continue;
    }
    const auto second = snapshot(c);
    for (std::size_t i = 0; i < first.size(); ++i) {
      ++files;
      if (first[i] != second[i]) {
        mismatched.push_back(c.name + ": " + std::filesystem::path(c.outputs[i]).filename().string());
      }
    }
  }

  std::ostringstream h1;
  std::ostringstream h2;
  {
    auto* old = std::cout.rdbuf(h1.rdbuf());
    cli::run({"homophily", "--input", graph, "--labels", d + "labels.txt"});
    std::cout.rdbuf(h2.rdbuf());
    cli::run({"homophily", "--input", graph, "--labels", d + "labels.txt"});
    std::cout.rdbuf(old);
  }
  ++files;
  if (h1.str() != h2.str() || h1.str().empty()) mismatched.push_back("homophily stdout");

  std::string detail = std::to_string(commands.size() + 1) + " commands run twice with --seed 42 --workers 1, " +
                       std::to_string(files) +
                       " outputs compared byte-for-byte (manifest wall time and bench timing columns excluded)";
  if (!mismatched.empty()) {
    detail += "; differing:";
    for (const auto& m : mismatched) detail += " [" + m + "]";
  }
  return {mismatched.empty(), detail};
}

}  // namespace
}  // namespace lapsparse

int main() {
  using namespace lapsparse;
  testing::TempDir scratch;
  report("unbiasedness", unbiasedness_suite);
  report("oracle-identities", oracle_identities);
  report("monte-carlo-rate", monte_carlo_rate);
  report("budget-sweep", [&] { return budget_sweep(scratch.path()); });
  report("loss-error-scaling", loss_scaling);
  report("budget-bound", budget_bound);
  report("determinism", [&] { return determinism(scratch); });
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
