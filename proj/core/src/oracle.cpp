#include "lapsparse/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "lapsparse/error.hpp"
#include "lapsparse/rng.hpp"
#include "parallel.hpp"

namespace lapsparse {

namespace {

// Relative tolerance for "no spread" and "exact match" in the z-table.
constexpr double kZeroSpread = 1e-12;

}  // namespace

void check_dense_limit(const Graph& g, std::size_t dense_limit) {
  if (g.num_nodes() > dense_limit) {
    throw ResourceLimit("graph has " + std::to_string(g.num_nodes()) +
                        " nodes, above the dense limit of " + std::to_string(dense_limit));
  }
}

DenseOperator dense_normalized_adjacency(const Graph& g, std::size_t dense_limit) {
  check_dense_limit(g, dense_limit);
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  const auto isd = g.inv_sqrt_degrees();
  for (ArcIndex a = 0; a < g.num_arcs(); ++a) {
    const NodeId u = g.arc_source(a);
    const NodeId v = g.arc_target(a);
    p(u, v) = isd[u] * isd[v];
  }
  return {std::move(p), "P = D^-1/2 A D^-1/2"};
}

DenseOperator dense_poly(const Graph& g, const CoeffVector& w, std::size_t dense_limit) {
  const Eigen::MatrixXd p = dense_normalized_adjacency(g, dense_limit).values;
  const auto n = p.rows();
  const unsigned max_hop = w.max_hop();
  Eigen::MatrixXd acc = w[max_hop] * Eigen::MatrixXd::Identity(n, n);
  for (unsigned k = max_hop; k-- > 0;) {
    acc = (acc * p).eval();
    acc.diagonal().array() += w[k];
  }
  return {std::move(acc), "sum_k w_k P^k, K = " + std::to_string(max_hop)};
}

DenseOperator dense_rw_poly(const Graph& g, unsigned k, std::size_t dense_limit) {
  check_dense_limit(g, dense_limit);
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd transition = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (NodeId u = 0; u < n; ++u) {
    const double inv = 1.0 / g.degree(u);
    for (NodeId v : g.neighbors(u)) transition(u, v) = inv;
    acc(u, u) = g.degree(u);
  }
  for (unsigned step = 0; step < k; ++step) acc = (acc * transition).eval();
  return {std::move(acc), "D (D^-1 A)^" + std::to_string(k)};
}

Eigen::MatrixXd to_dense(const SparseMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.dim());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (const Entry& e : m.entries()) out(e.row, e.col) += e.weight;
  return out;
}

// ---------------------------------------------------------------------------

double ZScoreTable::fraction_within_3sigma() const noexcept {
  return entries.empty() ? 1.0 : static_cast<double>(within_3sigma) / static_cast<double>(entries.size());
}

bool ZScoreTable::passed(double min_fraction) const noexcept {
  return !deterministic_bias() && fraction_within_3sigma() >= min_fraction;
}

ZScoreTable unbiasedness_test(std::span<const Eigen::MatrixXd> exact_parts, const TrialEstimator& estimator,
                              unsigned trials, std::uint64_t seed, unsigned workers) {
  if (trials < 2) throw InvalidInput("unbiasedness test needs at least two trials");
  if (exact_parts.empty()) throw InvalidInput("no exact parts to compare against");

  std::vector<std::vector<Eigen::MatrixXd>> results(trials);
  workers = std::clamp(workers, 1u, trials);
  detail::run_workers(workers, [&](unsigned w) {
    for (unsigned t = w; t < trials; t += workers) {
      results[t] = estimator(derive_seed(seed, {t}));
      if (results[t].size() != exact_parts.size()) {
        throw InvalidInput("estimator returned the wrong number of parts");
      }
      for (std::size_t p = 0; p < exact_parts.size(); ++p) {
        if (results[t][p].rows() != exact_parts[p].rows() || results[t][p].cols() != exact_parts[p].cols()) {
          throw InvalidInput("estimator part has the wrong shape");
        }
      }
    }
  });

  ZScoreTable table;
  table.trials = trials;
  const double t_count = trials;
  for (std::size_t p = 0; p < exact_parts.size(); ++p) {
    const Eigen::MatrixXd& exact = exact_parts[p];
    for (Eigen::Index i = 0; i < exact.rows(); ++i) {
      for (Eigen::Index j = 0; j < exact.cols(); ++j) {
        double sum = 0.0;
        for (const auto& r : results) sum += r[p](i, j);
        const double mean = sum / t_count;
        double ss = 0.0;
        for (const auto& r : results) {
          const double d = r[p](i, j) - mean;
          ss += d * d;
        }
        // Identical trial values leave a few ulps of spread from the summation;
        // treat that as zero variance.
        double stddev = std::sqrt(ss / (t_count - 1.0));
        if (stddev <= kZeroSpread * std::max(1.0, std::abs(mean))) stddev = 0.0;
        const double gap = mean - exact(i, j);

        ZScoreEntry e{static_cast<unsigned>(p), static_cast<NodeId>(i), static_cast<NodeId>(j),
                      exact(i, j), mean, stddev, 0.0, false};
        if (stddev == 0.0) {
          if (std::abs(gap) > kZeroSpread * std::max(1.0, std::abs(exact(i, j)))) {
            e.z = std::copysign(std::numeric_limits<double>::infinity(), gap);
            e.flagged = true;
            ++table.zero_variance_mismatches;
          }
        } else {
          e.z = gap / (stddev / std::sqrt(t_count));
          e.flagged = std::abs(e.z) > 4.0;
        }
        if (std::abs(e.z) <= 3.0) ++table.within_3sigma;
        if (e.flagged) ++table.flagged;
        table.entries.push_back(e);
      }
    }
  }
  return table;
}

ZScoreTable unbiasedness_test(const Graph& g, const UnbiasednessSpec& spec, unsigned trials, std::uint64_t seed,
                              unsigned workers, std::size_t dense_limit) {
  if (g.num_nodes() > kUnbiasednessNodeLimit) {
    throw ResourceLimit("unbiasedness test is limited to graphs with at most " +
                        std::to_string(kUnbiasednessNodeLimit) + " nodes");
  }
  if (trials < 30) throw InvalidInput("unbiasedness test needs at least 30 trials");
  check_dense_limit(g, dense_limit);

  SamplerConfig cfg;
  cfg.budget = spec.budget;
  cfg.mode = spec.regime;
  cfg.workers = 1;

  std::vector<Eigen::MatrixXd> exact;
  TrialEstimator estimator;
  switch (spec.regime) {
    case SamplingMode::kStatic: {
      if (!spec.coeffs) throw InvalidInput("static regime needs coefficients");
      const CoeffVector w = *spec.coeffs;
      exact.push_back(dense_poly(g, w, dense_limit).values);
      estimator = [&g, w, cfg](std::uint64_t s) {
        SamplerConfig c = cfg;
        c.seed = s;
        return std::vector<Eigen::MatrixXd>{to_dense(slsgc(g, w, c).matrix)};
      };
      break;
    }
    case SamplingMode::kLearnable: {
      const Eigen::MatrixXd p = dense_normalized_adjacency(g, dense_limit).values;
      Eigen::MatrixXd power = Eigen::MatrixXd::Identity(p.rows(), p.cols());
      for (unsigned k = 0; k <= spec.max_hop; ++k) {
        exact.push_back(power);
        power = (power * p).eval();
      }
      const unsigned max_hop = spec.max_hop;
      estimator = [&g, max_hop, cfg](std::uint64_t s) {
        SamplerConfig c = cfg;
        c.seed = s;
        std::vector<Eigen::MatrixXd> parts;
        for (const auto& h : glsgc(g, max_hop, c).hops) parts.push_back(to_dense(h));
        return parts;
      };
      break;
    }
    case SamplingMode::kNodeWise: {
      if (!spec.coeffs) throw InvalidInput("node-wise regime needs coefficients");
      if (spec.start_set.empty()) throw InvalidInput("node-wise regime needs a start set");
      const CoeffVector w = *spec.coeffs;
      const Eigen::MatrixXd full = dense_poly(g, w, dense_limit).values;
      Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(full.rows(), full.cols());
      for (NodeId u : spec.start_set) {
        if (u >= g.num_nodes()) throw InvalidInput("start set references a node outside the graph");
        rows.row(u) = full.row(u);
      }
      exact.push_back(std::move(rows));
      const std::vector<NodeId> starts = spec.start_set;
      estimator = [&g, w, starts, cfg](std::uint64_t s) {
        SamplerConfig c = cfg;
        c.seed = s;
        return std::vector<Eigen::MatrixXd>{to_dense(nodewise_sample(g, w, starts, c).matrix)};
      };
      break;
    }
  }
  return unbiasedness_test(exact, estimator, trials, seed, workers);
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kPsdTolerance = 1e-9;
constexpr double kRangeTolerance = 1e-10;

bool is_symmetric(const Eigen::MatrixXd& m) {
  return (m - m.transpose()).norm() <= 1e-9 * std::max(1.0, m.norm());
}

}  // namespace

SimilarityReport similarity_check(const DenseOperator& exact, const SparseMatrix& approx,
                                  const SimilarityOptions& options) {
  if (exact.dim() != approx.dim()) {
    throw InvalidInput("operator shapes differ: " + std::to_string(exact.dim()) + " vs " +
                       std::to_string(approx.dim()));
  }
  const Eigen::MatrixXd& e = exact.values;
  const Eigen::MatrixXd a = to_dense(approx);
  const Eigen::Index n = e.rows();

  SimilarityReport report;
  report.n = static_cast<std::size_t>(n);
  const Eigen::MatrixXd diff = a - e;
  report.frob_abs_err = diff.norm();
  const double exact_norm = e.norm();
  report.frob_rel_err = exact_norm > 0.0 ? report.frob_abs_err / exact_norm
                        : report.frob_abs_err == 0.0 ? 0.0
                                                     : std::numeric_limits<double>::infinity();
  report.max_abs_err = n > 0 ? diff.cwiseAbs().maxCoeff() : 0.0;

  // Quadratic forms only see the symmetric part of the sampled operator.
  const Eigen::MatrixXd a_sym = 0.5 * (a + a.transpose());
  Rng rng(derive_seed(options.seed, {0x70726f6265ULL}));
  for (unsigned i = 0; i < options.probes; ++i) {
    Eigen::VectorXd x(n);
    for (Eigen::Index j = 0; j < n; ++j) x[j] = rng.normal();
    x.normalize();
    const double q_exact = x.dot(e * x);
    if (std::abs(q_exact) < options.probe_tolerance) {
      ++report.rejected_probes;
      continue;
    }
    report.quad_ratios.push_back(x.dot(a_sym * x) / q_exact);
  }

  if (report.n > options.spectral_limit) {
    report.spectral_skipped = "n exceeds the spectral limit";
    return report;
  }
  if (!is_symmetric(e)) {
    report.spectral_skipped = "exact operator is not symmetric";
    return report;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> exact_eig(0.5 * (e + e.transpose()));
  const Eigen::VectorXd& lambda = exact_eig.eigenvalues();
  const double lambda_max = lambda.cwiseAbs().maxCoeff();
  if (lambda.minCoeff() < -kPsdTolerance * std::max(1.0, lambda_max)) {
    report.spectral_skipped = "exact operator is indefinite";
    return report;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> approx_eig(a_sym, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& mu = approx_eig.eigenvalues();
  if (mu.minCoeff() < -kPsdTolerance * std::max(1.0, mu.cwiseAbs().maxCoeff())) {
    report.spectral_skipped = "approximate operator is indefinite";
    return report;
  }

  // Generalized spectrum of (approx, exact) on the range of the exact operator.
  std::vector<Eigen::Index> range;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lambda[i] > kRangeTolerance * lambda_max) range.push_back(i);
  }
  if (range.empty()) {
    report.spectral_skipped = "exact operator is zero";
    return report;
  }
  const auto r = static_cast<Eigen::Index>(range.size());
  Eigen::MatrixXd basis(n, r);
  for (Eigen::Index c = 0; c < r; ++c) {
    basis.col(c) = exact_eig.eigenvectors().col(range[c]) / std::sqrt(lambda[range[c]]);
  }
  const Eigen::MatrixXd reduced = basis.transpose() * a_sym * basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gen(0.5 * (reduced + reduced.transpose()),
                                                     Eigen::EigenvaluesOnly);
  const double lo = gen.eigenvalues().minCoeff();
  const double hi = gen.eigenvalues().maxCoeff();
  report.eig_bounds = std::make_pair(lo, hi);
  report.epsilon_hat = std::max(std::abs(1.0 - lo), std::abs(hi - 1.0));
  return report;
}

SimilarityReport similarity_check(const DenseOperator& exact, const SparseOperator& approx,
                                  const SimilarityOptions& options) {
  SimilarityReport report = similarity_check(exact, approx.matrix, options);
  report.guarantee_heuristic = approx.meta.signed_coefficients;
  return report;
}

DiffHeatmap diff_heatmap(const DenseOperator& exact, const SparseMatrix& approx, double clip) {
  if (exact.dim() != approx.dim()) throw InvalidInput("operator shapes differ");
  if (!(clip > 0.0)) throw InvalidInput("clip range must be positive");
  const Eigen::MatrixXd a = to_dense(approx);
  const Eigen::MatrixXd& e = exact.values;
  DiffHeatmap out;
  out.clip = clip;
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.cols(); ++j) {
      if (e(i, j) == 0.0 && a(i, j) == 0.0) continue;
      const double d = a(i, j) - e(i, j);
      out.max_abs_diff = std::max(out.max_abs_diff, std::abs(d));
      out.cells.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), std::clamp(d, -clip, clip)});
    }
  }
  return out;
}

}  // namespace lapsparse
