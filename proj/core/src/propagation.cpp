#include "lapsparse/propagation.hpp"

#include <algorithm>
#include <cmath>

#include "lapsparse/error.hpp"
#include "parallel.hpp"

namespace lapsparse {

namespace {

void require_rows(const Signal& x, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(x.rows()) != n) {
    throw InvalidInput(std::string(what) + " has " + std::to_string(x.rows()) + " rows, expected " +
                       std::to_string(n));
  }
}

void require_finite(const Signal& x, const char* what) {
  if (!x.allFinite()) throw InvalidInput(std::string(what) + " has non-finite entries");
}

}  // namespace

Signal spmv(const SparseMatrix& op, const Signal& x, unsigned workers) {
  require_rows(x, op.dim(), "signal");
  Signal y = Signal::Zero(x.rows(), x.cols());
  const auto entries = op.entries();
  if (entries.empty()) return y;

  // Split the entry list at row boundaries so each row belongs to one worker.
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(entries.size())));
  std::vector<std::size_t> cuts(workers + 1, entries.size());
  cuts[0] = 0;
  for (unsigned w = 1; w < workers; ++w) {
    std::size_t c = entries.size() * w / workers;
    c = std::max(c, cuts[w - 1]);
    while (c > 0 && c < entries.size() && entries[c].row == entries[c - 1].row) ++c;
    cuts[w] = c;
  }
  detail::run_workers(workers, [&](unsigned w) {
    for (std::size_t i = cuts[w]; i < cuts[w + 1]; ++i) {
      const Entry& e = entries[i];
      y.row(e.row) += e.weight * x.row(e.col);
    }
  });
  return y;
}

Signal normalized_adjacency_apply(const Graph& g, const Signal& x) {
  require_rows(x, g.num_nodes(), "signal");
  const auto isd = g.inv_sqrt_degrees();
  Signal scaled = x;
  for (Eigen::Index u = 0; u < x.rows(); ++u) scaled.row(u) *= isd[u];
  Signal y = Signal::Zero(x.rows(), x.cols());
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    auto row = y.row(u);
    for (NodeId v : g.neighbors(u)) row += scaled.row(v);
    row *= isd[u];
  }
  return y;
}

CoeffVector appnp_coeffs(double alpha, unsigned max_hop) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("alpha must lie in (0, 1]");
  std::vector<double> w(max_hop + 1);
  double tail = 1.0;  // (1 - alpha)^k
  for (unsigned k = 0; k < max_hop; ++k) {
    w[k] = alpha * tail;
    tail *= 1.0 - alpha;
  }
  w[max_hop] = tail;
  return CoeffVector(std::move(w));
}

Signal exact_k_round(const Graph& g, const CoeffVector& w, const Signal& x) {
  require_rows(x, g.num_nodes(), "signal");
  Signal acc = w[0] * x;
  Signal power = x;
  for (unsigned k = 1; k <= w.max_hop(); ++k) {
    power = normalized_adjacency_apply(g, power);
    acc += w[k] * power;
  }
  return acc;
}

double appnp_loss(const Graph& g, const Signal& z, const Signal& x, double alpha) {
  require_rows(z, g.num_nodes(), "z");
  if (z.rows() != x.rows() || z.cols() != x.cols()) throw InvalidInput("z and x shapes differ");
  require_finite(z, "z");
  require_finite(x, "x");
  const Signal laplacian_z = z - normalized_adjacency_apply(g, z);
  const double smoothness = (z.array() * laplacian_z.array()).sum();
  const double fidelity = (z - x).squaredNorm();
  return (1.0 - alpha) * smoothness + alpha * fidelity;
}

Signal appnp_fixed_point(const Graph& g, const Signal& x, double alpha, double tolerance,
                         unsigned max_iterations) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("alpha must lie in (0, 1]");
  require_rows(x, g.num_nodes(), "signal");
  const auto n = x.rows();
  auto apply = [&](const Signal& v) -> Signal { return v - (1.0 - alpha) * normalized_adjacency_apply(g, v); };

  Signal z = Signal::Zero(n, x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const Signal b = alpha * x.col(c);
    const double b_norm = b.norm();
    if (b_norm == 0.0) continue;
    Signal sol = Signal::Zero(n, 1);
    Signal r = b;
    Signal p = r;
    double rr = r.squaredNorm();
    for (unsigned it = 0; it < max_iterations && std::sqrt(rr) > tolerance * b_norm; ++it) {
      const Signal ap = apply(p);
      const double step = rr / (p.array() * ap.array()).sum();
      sol += step * p;
      r -= step * ap;
      const double rr_next = r.squaredNorm();
      p = r + (rr_next / rr) * p;
      rr = rr_next;
    }
    z.col(c) = sol;
  }
  return z;
}

LossReport loss_error_experiment(const Graph& g, const Signal& x, double alpha, unsigned max_hop,
                                 const SamplerConfig& cfg) {
  const CoeffVector w = appnp_coeffs(alpha, max_hop);
  SamplerConfig static_cfg = cfg;
  static_cfg.mode = SamplingMode::kStatic;

  const Signal z = exact_k_round(g, w, x);
  const SparseOperator op = slsgc(g, w, static_cfg);
  const Signal z_approx = spmv(op.matrix, x, static_cfg.workers);

  LossReport report;
  report.loss_exact = appnp_loss(g, z, x, alpha);
  report.loss_approx = appnp_loss(g, z_approx, x, alpha);
  report.abs_err = std::abs(report.loss_exact - report.loss_approx);
  report.relative = report.loss_exact != 0.0;
  report.rel_err = report.relative ? report.abs_err / std::abs(report.loss_exact) : report.abs_err;
  report.alpha = alpha;
  report.max_hop = max_hop;
  report.samples = op.meta.total_samples;
  report.seed = cfg.seed;
  report.nnz = op.matrix.nnz();
  report.self_loops = g.has_self_loops();
  return report;
}

}  // namespace lapsparse
