#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lapsparse/api.hpp"
#include "lapsparse/error.hpp"
#include "lapsparse/graph.hpp"
#include "lapsparse/io.hpp"
#include "lapsparse/oracle.hpp"
#include "lapsparse/propagation.hpp"
#include "lapsparse/rng.hpp"
#include "lapsparse/sparsifier.hpp"
#include "lapsparse/version.hpp"

namespace lapsparse::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

/// Usage errors detected after CLI11 parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw UsageError(std::string(flag) + ": cannot parse \"" + item + "\"");
    out.push_back(v);
  }
  return out;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// ---------------------------------------------------------------------------
// Shared option groups

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::string manifest;

  void add(CLI::App& app) {
    app.add_option("--seed", seed, "RNG seed (a random seed is drawn and printed when omitted)");
    app.add_option("--workers", workers, "Worker threads; fixes the stream assignment")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--manifest", manifest, "Run manifest path (default: <output>.manifest.json)");
  }

  std::uint64_t resolve_seed() {
    if (!seed) {
      seed = std::random_device{}() ^ (static_cast<std::uint64_t>(std::random_device{}()) << 32);
      std::cout << "seed=" << *seed << '\n';
    }
    return *seed;
  }
};

struct CoeffOptions {
  std::string coeffs;
  std::optional<double> appnp_alpha;
  std::optional<unsigned> max_hop;

  void add(CLI::App& app) {
    auto* c = app.add_option("--coeffs", coeffs, "Polynomial coefficients \"w0,w1,...\"");
    auto* a = app.add_option("--appnp-alpha", appnp_alpha, "Use APPNP coefficients with this alpha");
    c->excludes(a);
    app.add_option("--K", max_hop, "Maximum hop K");
  }

  /// Coefficients when given, nullopt when only K was supplied.
  std::optional<CoeffVector> resolve() const {
    if (appnp_alpha) {
      if (!max_hop) throw UsageError("--appnp-alpha needs --K");
      if (!(*appnp_alpha > 0.0 && *appnp_alpha <= 1.0)) throw UsageError("--appnp-alpha must lie in (0, 1]");
      return appnp_coeffs(*appnp_alpha, *max_hop);
    }
    if (!coeffs.empty()) {
      CoeffVector w(parse_list(coeffs, "--coeffs"));
      if (max_hop && *max_hop != w.max_hop()) throw UsageError("--K disagrees with the number of --coeffs");
      return w;
    }
    return std::nullopt;
  }
};

struct BudgetOptions {
  std::optional<std::uint64_t> samples;
  std::optional<double> ec;

  void add(CLI::App& app) {
    auto* s = app.add_option("--samples", samples, "Sample budget M")->check(CLI::PositiveNumber);
    auto* e = app.add_option("--ec", ec, "Budget factor: ceil(ec * n * ln n) samples per hop")
                  ->check(CLI::PositiveNumber);
    s->excludes(e);
  }

  SampleBudget resolve(double default_ec = 1.0) const {
    if (samples) return SampleCount{*samples};
    return EcFactor{ec.value_or(default_ec)};
  }
};

struct Manifest {
  std::string command;
  std::vector<std::string> args;
  json parameters = json::object();
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  double wall_time = 0.0;

  json to_json() const {
    return {{"command", command},
            {"args", args},
            {"cwd", fs::current_path().string()},
            {"parameters", parameters},
            {"seed", seed},
            {"workers", workers},
            {"outputs", outputs},
            {"library_version", std::string(kVersion)},
            {"wall_time_seconds", wall_time}};
  }
};

// Original arguments with --seed/--workers replaced by their resolved values.
std::vector<std::string> resolved_args(const std::vector<std::string>& args, std::uint64_t seed, unsigned workers) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--seed" || a == "--workers" || a == "--manifest") {
      ++i;
      continue;
    }
    if (a.starts_with("--seed=") || a.starts_with("--workers=") || a.starts_with("--manifest=")) continue;
    out.push_back(a);
  }
  out.insert(out.end(), {"--seed", std::to_string(seed), "--workers", std::to_string(workers)});
  return out;
}

void write_manifest(const Manifest& m, const std::string& explicit_path, const std::string& output) {
  fs::path path;
  if (!explicit_path.empty()) {
    path = explicit_path;
  } else if (!output.empty()) {
    path = output + ".manifest.json";
  } else {
    return;
  }
  write_json(path, m.to_json());
}

void emit_json(const json& j, const std::string& output) {
  if (output.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json(output, j);
  }
}

std::vector<NodeId> load_start_set(const std::string& path, const LoadedGraph& loaded) {
  auto set = read_node_set(path, loaded.raw_ids);
  if (set.empty()) throw UsageError("--start-set is empty");
  return set;
}

// ---------------------------------------------------------------------------
// sparsify

struct SparsifyCommand {
  std::string input;
  std::string mode = "static";
  CoeffOptions coeffs;
  BudgetOptions budget;
  CommonOptions common;
  std::string start_set;
  bool symmetrize = false;
  bool add_self_loops = false;
  std::string output;

  void add(CLI::App& app) {
    app.add_option("--input", input, "Edge list")->required();
    app.add_option("--mode", mode, "static | learnable | nodewise")
        ->check(CLI::IsMember({"static", "learnable", "nodewise"}))
        ->capture_default_str();
    coeffs.add(app);
    budget.add(app);
    common.add(app);
    app.add_option("--start-set", start_set, "Start nodes for nodewise mode, one raw id per line");
    app.add_flag("--symmetrize", symmetrize, "Average (u,v) and (v,u)");
    app.add_flag("--add-self-loops", add_self_loops, "Give every node one self-loop");
    app.add_option("--output", output, "Output TSV path (learnable: <output>.hopK)")->required();
  }

  int run(const std::vector<std::string>& args) {
    const auto start = Clock::now();
    const SamplingMode m = parse_mode(mode);
    if (m == SamplingMode::kNodeWise && start_set.empty()) throw UsageError("nodewise mode needs --start-set");
    if (m != SamplingMode::kNodeWise && !start_set.empty()) throw UsageError("--start-set is only valid in nodewise mode");

    const LoadedGraph loaded = load_graph(input, add_self_loops);
    SparsifyOptions options;
    options.coeffs = coeffs.resolve();
    options.max_hop = coeffs.max_hop;
    if (!options.coeffs && m != SamplingMode::kLearnable) throw UsageError("--coeffs or --appnp-alpha/--K required");
    if (!options.coeffs && !options.max_hop) throw UsageError("learnable mode needs --K or --coeffs");
    if (m == SamplingMode::kNodeWise) options.start_set = load_start_set(start_set, loaded);
    options.sampler.mode = m;
    options.sampler.budget = budget.resolve();
    options.sampler.seed = common.resolve_seed();
    options.sampler.workers = common.workers;
    options.sampler.symmetrize = symmetrize;

    const auto sample_start = Clock::now();
    const SparsifyResult result = sparsify(loaded.graph, options);
    const double sample_seconds = seconds_since(sample_start);

    Manifest manifest;
    manifest.command = "sparsify";
    std::size_t nnz = 0;
    if (const auto* op = std::get_if<SparseOperator>(&result)) {
      write_operator_tsv(output, op->matrix);
      manifest.outputs.push_back(output);
      nnz = op->matrix.nnz();
    } else {
      const auto& parts = std::get<HopPartitionedOperator>(result);
      for (const auto& p : write_partitioned_tsv(output, parts)) manifest.outputs.push_back(p.string());
      nnz = parts.total_nnz();
    }
    const std::string ids = output + ".ids.tsv";
    write_id_map(ids, loaded.raw_ids);
    const std::string sidecar = output + ".json";
    json meta = to_json(meta_of(result));
    meta["nnz"] = nnz;
    if (options.coeffs) meta["coeffs"] = std::vector<double>(options.coeffs->values().begin(), options.coeffs->values().end());
    write_json(sidecar, meta);
    manifest.outputs.push_back(ids);
    manifest.outputs.push_back(sidecar);

    std::cout << "nnz=" << nnz << " sample_seconds=" << format_double(sample_seconds) << '\n';

    manifest.args = resolved_args(args, options.sampler.seed, common.workers);
    manifest.parameters = {{"input", input},       {"mode", mode},
                           {"symmetrize", symmetrize}, {"add_self_loops", add_self_loops},
                           {"start_set", start_set}, {"meta", meta}};
    manifest.seed = options.sampler.seed;
    manifest.workers = common.workers;
    manifest.wall_time = seconds_since(start);
    write_manifest(manifest, common.manifest, output);
    return kOk;
  }
};

// ---------------------------------------------------------------------------
// verify

struct VerifyCommand {
  std::string input;
  std::string mode = "static";
  CoeffOptions coeffs;
  BudgetOptions budget;
  CommonOptions common;
  std::string start_set;
  bool add_self_loops = false;
  unsigned trials = 0;
  std::string ec_sweep;
  unsigned probes = 64;
  std::size_t dense_limit = kDefaultDenseLimit;
  std::string diff_prefix;
  std::string output;

  void add(CLI::App& app) {
    app.add_option("--input", input, "Edge list")->required();
    app.add_option("--mode", mode, "static | learnable | nodewise")
        ->check(CLI::IsMember({"static", "learnable", "nodewise"}))
        ->capture_default_str();
    coeffs.add(app);
    budget.add(app);
    common.add(app);
    app.add_option("--start-set", start_set, "Start nodes for nodewise mode");
    app.add_flag("--add-self-loops", add_self_loops, "Give every node one self-loop");
    app.add_option("--trials", trials, "Unbiasedness trials (0 skips the test; otherwise >= 30)");
    app.add_option("--ec-sweep", ec_sweep, "Comma-separated ec values, e.g. \"0.1,1,10\"");
    app.add_option("--probes", probes, "Random probe vectors for quadratic-form ratios")->capture_default_str();
    app.add_option("--dense-limit", dense_limit, "Refuse graphs with more nodes")->capture_default_str();
    app.add_option("--diff-prefix", diff_prefix, "Write <prefix>.ec<value>.tsv difference heatmaps");
    app.add_option("--output", output, "Report JSON path (default: stdout)");
  }

  int run(const std::vector<std::string>& args) {
    const auto start = Clock::now();
    const SamplingMode m = parse_mode(mode);
    const LoadedGraph loaded = load_graph(input, add_self_loops);
    const Graph& g = loaded.graph;
    if (g.num_nodes() > dense_limit) {
      std::cerr << "error: graph has " << g.num_nodes() << " nodes, above the dense limit of " << dense_limit
                << "; refusing to build the dense oracle\n";
      return kUsage;
    }
    const std::optional<CoeffVector> w = coeffs.resolve();
    if (!w) throw UsageError("verify needs --coeffs or --appnp-alpha/--K");
    if (m == SamplingMode::kNodeWise && start_set.empty()) throw UsageError("nodewise mode needs --start-set");
    std::vector<NodeId> starts;
    if (m == SamplingMode::kNodeWise) starts = load_start_set(start_set, loaded);
    if (trials != 0 && trials < 30) throw UsageError("--trials must be 0 or at least 30");

    const std::uint64_t seed = common.resolve_seed();
    std::vector<double> sweep = ec_sweep.empty() ? std::vector<double>{} : parse_list(ec_sweep, "--ec-sweep");
    for (double ec : sweep) {
      if (!(ec > 0.0)) throw UsageError("--ec-sweep values must be positive");
    }

    json report = {{"input", input}, {"mode", mode}, {"n", g.num_nodes()}, {"m", g.num_edges()}};
    report["coeffs"] = std::vector<double>(w->values().begin(), w->values().end());
    int exit_code = kOk;

    if (trials > 0 && g.num_nodes() > kUnbiasednessNodeLimit) {
      report["unbiasedness"] = {{"skipped", "graph has more than " + std::to_string(kUnbiasednessNodeLimit) +
                                                " nodes; the trial-by-trial dense comparison is limited to small graphs"}};
    } else if (trials > 0) {
      UnbiasednessSpec spec;
      spec.regime = m;
      spec.coeffs = *w;
      spec.max_hop = w->max_hop();
      spec.start_set = starts;
      spec.budget = budget.resolve();
      const ZScoreTable table = unbiasedness_test(g, spec, trials, derive_seed(seed, {1}), common.workers, dense_limit);
      report["unbiasedness"] = to_json(table);
      if (!table.passed()) exit_code = kVerificationFailed;
    }

    // Exact target: full filter, restricted to the start rows in nodewise mode.
    DenseOperator exact = dense_poly(g, *w, dense_limit);
    if (m == SamplingMode::kNodeWise) restrict_rows(exact.values, starts);

    auto evaluate = [&](const SampleBudget& b, std::uint64_t point_seed) {
      SparsifyOptions options;
      options.coeffs = *w;
      options.start_set = starts;
      options.sampler.mode = m;
      options.sampler.budget = b;
      options.sampler.seed = point_seed;
      options.sampler.workers = common.workers;
      SparsifyResult result = sparsify(g, options);
      SparseOperator op = std::holds_alternative<SparseOperator>(result)
                              ? std::get<SparseOperator>(std::move(result))
                              : collapse(std::get<HopPartitionedOperator>(result), *w);
      SimilarityOptions sim;
      sim.probes = probes;
      sim.seed = point_seed;
      json point = {{"total_samples", op.meta.total_samples}, {"nnz", op.matrix.nnz()}};
      point["similarity"] = to_json(similarity_check(exact, op, sim));
      return std::make_pair(std::move(op), std::move(point));
    };

    if (sweep.empty()) {
      auto [op, point] = evaluate(budget.resolve(), seed);
      report["result"] = std::move(point);
    } else {
      json points = json::array();
      for (std::size_t i = 0; i < sweep.size(); ++i) {
        auto [op, point] = evaluate(EcFactor{sweep[i]}, derive_seed(seed, {2, i}));
        point["ec"] = sweep[i];
        const DiffHeatmap heat = diff_without_hop0(g, *w, op.matrix, starts, m);
        point["max_abs_diff_excluding_hop0"] = heat.max_abs_diff;
        point["diff_clip"] = json::array({-heat.clip, heat.clip});
        if (!diff_prefix.empty()) {
          const std::string path = diff_prefix + ".ec" + format_double(sweep[i]) + ".tsv";
          write_diff_tsv(path, heat);
          point["diff_path"] = path;
          outputs.push_back(path);
        }
        points.push_back(std::move(point));
      }
      report["sweep"] = std::move(points);
    }

    emit_json(report, output);
    if (!output.empty()) outputs.push_back(output);

    Manifest manifest;
    manifest.command = "verify";
    manifest.args = resolved_args(args, seed, common.workers);
    manifest.parameters = {{"input", input},   {"mode", mode},          {"trials", trials},
                           {"ec_sweep", sweep}, {"probes", probes},      {"dense_limit", dense_limit},
                           {"add_self_loops", add_self_loops}};
    manifest.outputs = outputs;
    manifest.seed = seed;
    manifest.workers = common.workers;
    manifest.wall_time = seconds_since(start);
    write_manifest(manifest, common.manifest, output);
    return exit_code;
  }

 private:
  std::vector<std::string> outputs;

  static void restrict_rows(Eigen::MatrixXd& m, const std::vector<NodeId>& rows) {
    Eigen::MatrixXd kept = Eigen::MatrixXd::Zero(m.rows(), m.cols());
    for (NodeId u : rows) kept.row(u) = m.row(u);
    m = std::move(kept);
  }

  // Heatmap of approx - exact with the exact hop-0 term removed from both.
  static DiffHeatmap diff_without_hop0(const Graph& g, const CoeffVector& w, const SparseMatrix& approx,
                                       const std::vector<NodeId>& starts, SamplingMode m) {
    const std::size_t n = g.num_nodes();
    DenseOperator exact{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                        "sum_{k>=1} w_k P^k"};
    if (w.sampled_l1() > 0.0) {
      std::vector<double> tail(w.values().begin(), w.values().end());
      tail[0] = 0.0;
      exact = dense_poly(g, CoeffVector(std::move(tail)));
    }
    if (m == SamplingMode::kNodeWise) restrict_rows(exact.values, starts);

    std::vector<Entry> hop0;
    if (w[0] != 0.0) {
      if (m == SamplingMode::kNodeWise) {
        for (NodeId u : starts) hop0.push_back({u, u, w[0]});
      } else {
        for (NodeId u = 0; u < n; ++u) hop0.push_back({u, u, w[0]});
      }
    }
    const SparseMatrix stripped =
        linear_combination(1.0, approx, -1.0, SparseMatrix::from_sorted(n, std::move(hop0)));
    return diff_heatmap(exact, stripped);
  }
};

// ---------------------------------------------------------------------------
// appnp-check

struct AppnpCheckCommand {
  std::string input;
  double alpha = 0.1;
  unsigned max_hop = 10;
  BudgetOptions budget;
  CommonOptions common;
  std::string signal = "random";
  unsigned channels = 8;
  unsigned trials = 20;
  bool add_self_loops = false;
  std::string output;

  void add(CLI::App& app) {
    app.add_option("--input", input, "Edge list")->required();
    app.add_option("--alpha", alpha, "Restart probability in (0, 1]")->required();
    app.add_option("--K", max_hop, "Propagation rounds")->required();
    budget.add(app);
    common.add(app);
    app.add_option("--signal", signal, "\"random\" or a signal TSV path")->capture_default_str();
    app.add_option("--channels", channels, "Channels of the random signal")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--trials", trials, "Independent sparsifier draws")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_flag("--add-self-loops", add_self_loops, "Give every node one self-loop");
    app.add_option("--output", output, "Report JSON path (default: stdout)");
  }

  int run(const std::vector<std::string>& args) {
    const auto start = Clock::now();
    if (!(alpha > 0.0 && alpha <= 1.0)) throw UsageError("--alpha must lie in (0, 1]");
    const LoadedGraph loaded = load_graph(input, add_self_loops);
    const Graph& g = loaded.graph;
    const std::uint64_t seed = common.resolve_seed();

    Signal x;
    if (signal == "random") {
      x = Signal(static_cast<Eigen::Index>(g.num_nodes()), channels);
      Rng rng(derive_seed(seed, {0x7369676eULL}));
      for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    } else {
      x = read_signal_tsv(signal, loaded.raw_ids);
    }

    SamplerConfig cfg;
    cfg.mode = SamplingMode::kStatic;
    cfg.budget = budget.resolve();
    cfg.workers = common.workers;

    json reports = json::array();
    std::vector<double> errs;
    for (unsigned t = 0; t < trials; ++t) {
      cfg.seed = derive_seed(seed, {t});
      const LossReport r = loss_error_experiment(g, x, alpha, max_hop, cfg);
      errs.push_back(r.rel_err);
      reports.push_back(to_json(r));
    }
    json summary = {{"trials", trials},
                    {"median", quantile(errs, 0.5)},
                    {"p10", quantile(errs, 0.1)},
                    {"p90", quantile(errs, 0.9)},
                    {"min", *std::min_element(errs.begin(), errs.end())},
                    {"max", *std::max_element(errs.begin(), errs.end())}};
    json out = {{"input", input},     {"alpha", alpha}, {"K", max_hop},
                {"channels", x.cols()}, {"reports", reports}, {"summary", summary}};
    emit_json(out, output);

    Manifest manifest;
    manifest.command = "appnp-check";
    manifest.args = resolved_args(args, seed, common.workers);
    manifest.parameters = {{"input", input}, {"alpha", alpha}, {"K", max_hop},
                           {"signal", signal}, {"channels", channels}, {"trials", trials},
                           {"add_self_loops", add_self_loops}};
    if (!output.empty()) manifest.outputs.push_back(output);
    manifest.seed = seed;
    manifest.workers = common.workers;
    manifest.wall_time = seconds_since(start);
    write_manifest(manifest, common.manifest, output);
    return kOk;
  }
};

// ---------------------------------------------------------------------------
// bench

struct BenchCommand {
  std::string input;
  std::string mode = "static";
  std::string hops = "2";
  std::string samples;
  double alpha = 0.1;
  unsigned repeats = 3;
  unsigned channels = 16;
  CommonOptions common;
  bool add_self_loops = false;
  std::string output;

  void add(CLI::App& app) {
    app.add_option("--input", input, "Edge list")->required();
    app.add_option("--mode", mode, "static | learnable")
        ->check(CLI::IsMember({"static", "learnable"}))
        ->capture_default_str();
    app.add_option("--K", hops, "Comma-separated K values")->capture_default_str();
    app.add_option("--samples", samples, "Comma-separated sample budgets M (empty: header only)");
    app.add_option("--alpha", alpha, "APPNP alpha for the benchmark coefficients")->capture_default_str();
    app.add_option("--repeats", repeats, "Timing repeats (median is reported)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--channels", channels, "Signal channels for the spmv timing")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    common.add(app);
    app.add_flag("--add-self-loops", add_self_loops, "Give every node one self-loop");
    app.add_option("--output", output, "TSV path (default: stdout)");
  }

  int run(const std::vector<std::string>& args) {
    const auto start = Clock::now();
    const LoadedGraph loaded = load_graph(input, add_self_loops);
    const Graph& g = loaded.graph;
    const SamplingMode m = parse_mode(mode);
    const std::uint64_t seed = common.resolve_seed();

    std::vector<unsigned> ks;
    for (double k : parse_list(hops, "--K")) {
      if (k < 1 || k != std::floor(k)) throw UsageError("--K values must be positive integers");
      ks.push_back(static_cast<unsigned>(k));
    }
    std::vector<std::uint64_t> budgets;
    for (double s : parse_list(samples, "--samples")) {
      if (s < 1 || s != std::floor(s)) throw UsageError("--samples values must be positive integers");
      budgets.push_back(static_cast<std::uint64_t>(s));
    }

    std::ostringstream tsv;
    tsv << "n\tm\tK\tM\tsample_seconds\tspmv_seconds\tpeak_memory_bytes\n";
    const std::size_t graph_bytes = g.row_offsets().size_bytes() + 2 * g.adjacency().size_bytes() +
                                    g.degrees().size_bytes() + g.inv_sqrt_degrees().size_bytes();
    Rng rng(derive_seed(seed, {0x62656e6368ULL}));
    Signal x(static_cast<Eigen::Index>(g.num_nodes()), channels);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();

    for (unsigned k : ks) {
      const CoeffVector w = appnp_coeffs(alpha, k);
      for (std::uint64_t budget_m : budgets) {
        SamplerConfig cfg;
        cfg.mode = m;
        cfg.budget = SampleCount{budget_m};
        cfg.seed = derive_seed(seed, {k, budget_m});
        cfg.workers = common.workers;
        std::vector<double> sample_times;
        std::vector<double> spmv_times;
        std::size_t nnz = 0;
        for (unsigned r = 0; r < repeats; ++r) {
          const auto t0 = Clock::now();
          SparseOperator op = m == SamplingMode::kStatic ? slsgc(g, w, cfg) : collapse(glsgc(g, k, cfg), w);
          sample_times.push_back(seconds_since(t0));
          nnz = op.matrix.nnz();
          const auto t1 = Clock::now();
          const Signal y = spmv(op.matrix, x, common.workers);
          spmv_times.push_back(seconds_since(t1));
          if (!y.allFinite()) throw Error("non-finite spmv result");
        }
        // CSR graph + operator entries + hash accumulator (~48 bytes per distinct pair).
        const std::size_t peak = graph_bytes + nnz * (sizeof(Entry) + 48) +
                                 static_cast<std::size_t>(x.size()) * 2 * sizeof(double);
        tsv << g.num_nodes() << '\t' << g.num_edges() << '\t' << k << '\t' << budget_m << '\t'
            << format_double(quantile(sample_times, 0.5)) << '\t' << format_double(quantile(spmv_times, 0.5)) << '\t'
            << peak << '\n';
      }
    }

    if (output.empty()) {
      std::cout << tsv.str();
    } else {
      std::ofstream out(output, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot write " + output);
      out << tsv.str();
    }

    Manifest manifest;
    manifest.command = "bench";
    manifest.args = resolved_args(args, seed, common.workers);
    manifest.parameters = {{"input", input}, {"mode", mode}, {"K", hops}, {"samples", samples},
                           {"alpha", alpha}, {"repeats", repeats}, {"channels", channels}};
    if (!output.empty()) manifest.outputs.push_back(output);
    manifest.seed = seed;
    manifest.workers = common.workers;
    manifest.wall_time = seconds_since(start);
    write_manifest(manifest, common.manifest, output);
    return kOk;
  }
};

// ---------------------------------------------------------------------------
// homophily, generate, replay

struct HomophilyCommand {
  std::string input;
  std::string labels;

  void add(CLI::App& app) {
    app.add_option("--input", input, "Edge list")->required();
    app.add_option("--labels", labels, "\"node label\" per line")->required();
  }

  int run() {
    const LoadedGraph loaded = load_graph(input, false);
    const LabelMap map = load_labels(labels, loaded.raw_ids);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", edge_homophily(loaded.graph, map));
    std::cout << buf << '\n';
    return kOk;
  }
};

struct GenerateCommand {
  std::size_t nodes = 100;
  double mean_degree = 8.0;
  std::uint64_t seed = 0;
  std::string output;

  void add(CLI::App& app) {
    app.add_option("--nodes", nodes, "Node count")->check(CLI::Range(2, 1 << 30))->capture_default_str();
    app.add_option("--mean-degree", mean_degree, "Expected degree")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--seed", seed, "RNG seed")->capture_default_str();
    app.add_option("--output", output, "Edge list path")->required();
  }

  int run() {
    const Graph g = random_graph(nodes, mean_degree, seed, false);
    std::ofstream out(output, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + output);
    for (const auto& [u, v] : g.undirected_edges()) out << u << '\t' << v << '\n';
    if (!out) throw IoError("error writing " + output);
    return kOk;
  }
};

int dispatch(const std::vector<std::string>& args);

struct ReplayCommand {
  std::string manifest;

  void add(CLI::App& app) {
    app.add_option("manifest", manifest, "Manifest written by a previous run")->required();
  }

  int run() {
    const json m = json::parse(read_text(manifest));
    const auto replay_args = m.at("args").get<std::vector<std::string>>();
    const fs::path cwd = m.at("cwd").get<std::string>();
    const fs::path here = fs::current_path();
    fs::current_path(cwd);
    struct Restore {
      fs::path dir;
      ~Restore() { fs::current_path(dir); }
    } restore{here};
    return dispatch(replay_args);
  }
};

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Random-walk Laplacian sparsification of polynomial graph filters", "lapsparse"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SparsifyCommand sparsify_cmd;
  VerifyCommand verify_cmd;
  AppnpCheckCommand appnp_cmd;
  BenchCommand bench_cmd;
  HomophilyCommand homophily_cmd;
  GenerateCommand generate_cmd;
  ReplayCommand replay_cmd;

  auto* s = app.add_subcommand("sparsify", "Sample a sparse approximation of sum_k w_k P^k");
  sparsify_cmd.add(*s);
  auto* v = app.add_subcommand("verify", "Compare sparsifiers with the dense oracle");
  verify_cmd.add(*v);
  auto* a = app.add_subcommand("appnp-check", "Relative APPNP loss error of one sparsified round");
  appnp_cmd.add(*a);
  auto* b = app.add_subcommand("bench", "Time sampling and spmv over budgets and K");
  bench_cmd.add(*b);
  auto* h = app.add_subcommand("homophily", "Edge homophily of a labelled graph");
  homophily_cmd.add(*h);
  auto* gen = app.add_subcommand("generate", "Write a random Erdos-Renyi style edge list");
  generate_cmd.add(*gen);
  auto* r = app.add_subcommand("replay", "Re-run a command from its manifest");
  replay_cmd.add(*r);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*s) return sparsify_cmd.run(args);
    if (*v) return verify_cmd.run(args);
    if (*a) return appnp_cmd.run(args);
    if (*b) return bench_cmd.run(args);
    if (*h) return homophily_cmd.run();
    if (*gen) return generate_cmd.run();
    if (*r) return replay_cmd.run();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace

int run(const std::vector<std::string>& args) { return dispatch(args); }

}  // namespace lapsparse::cli
