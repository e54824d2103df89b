#include "lapsparse/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "lapsparse/error.hpp"

namespace lapsparse {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("cannot format number");
  return {buf, ptr};
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("error writing " + path.string());
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t tab = line.find_first_of("\t ", pos);
    if (tab == std::string_view::npos) {
      if (pos < line.size()) fields.push_back(line.substr(pos));
      break;
    }
    if (tab > pos) fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// Calls fn(line_number, fields) for each data line after the header.
template <typename Fn>
void for_each_tsv_row(const fs::path& path, Fn&& fn) {
  const std::string text = read_text(path);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_tabs(line);
    if (header) {
      header = false;
      fn(line_no, fields, true);
      continue;
    }
    fn(line_no, fields, false);
  }
  if (header) throw ParseError(path.string(), line_no, "missing header line");
}

std::unordered_map<std::int64_t, NodeId> compact_index(std::span<const std::int64_t> raw_ids) {
  std::unordered_map<std::int64_t, NodeId> index;
  index.reserve(raw_ids.size());
  for (std::size_t c = 0; c < raw_ids.size(); ++c) index.emplace(raw_ids[c], static_cast<NodeId>(c));
  return index;
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_operator_tsv(const fs::path& path, const SparseMatrix& m) {
  auto out = open_out(path);
  out << "u\tv\tweight\n";
  for (const Entry& e : m.entries()) out << e.row << '\t' << e.col << '\t' << format_double(e.weight) << '\n';
  close_out(out, path);
}

SparseMatrix read_operator_tsv(const fs::path& path, std::size_t n) {
  std::vector<Entry> entries;
  for_each_tsv_row(path, [&](std::size_t line, const std::vector<std::string_view>& f, bool header) {
    if (header) {
      if (f.size() != 3 || f[0] != "u" || f[1] != "v" || f[2] != "weight") {
        throw ParseError(path.string(), line, "expected header \"u v weight\"");
      }
      return;
    }
    Entry e{};
    if (f.size() != 3 || !parse_number(f[0], e.row) || !parse_number(f[1], e.col) ||
        !parse_number(f[2], e.weight)) {
      throw ParseError(path.string(), line, "expected \"u v weight\"");
    }
    if (e.row >= n || e.col >= n) throw ParseError(path.string(), line, "node id out of range");
    entries.push_back(e);
  });
  return SparseMatrix::from_triplets(n, std::move(entries));
}

fs::path hop_path(const fs::path& base, unsigned k) {
  fs::path p = base;
  p += ".hop" + std::to_string(k);
  return p;
}

std::vector<fs::path> write_partitioned_tsv(const fs::path& base, const HopPartitionedOperator& op) {
  std::vector<fs::path> paths;
  for (unsigned k = 0; k < op.hops.size(); ++k) {
    paths.push_back(hop_path(base, k));
    write_operator_tsv(paths.back(), op.hops[k]);
  }
  return paths;
}

void write_id_map(const fs::path& path, std::span<const std::int64_t> raw_ids) {
  auto out = open_out(path);
  out << "raw_id\tcompact_id\n";
  for (std::size_t c = 0; c < raw_ids.size(); ++c) out << raw_ids[c] << '\t' << c << '\n';
  close_out(out, path);
}

Signal read_signal_tsv(const fs::path& path, std::span<const std::int64_t> raw_ids) {
  const auto index = compact_index(raw_ids);
  Signal x;
  std::vector<bool> seen(raw_ids.size(), false);
  std::size_t channels = 0;
  for_each_tsv_row(path, [&](std::size_t line, const std::vector<std::string_view>& f, bool header) {
    if (header) {
      if (f.size() < 2 || f[0] != "node") throw ParseError(path.string(), line, "expected header \"node f0 ...\"");
      channels = f.size() - 1;
      x = Signal::Zero(static_cast<Eigen::Index>(raw_ids.size()), static_cast<Eigen::Index>(channels));
      return;
    }
    std::int64_t raw = 0;
    if (f.size() != channels + 1 || !parse_number(f[0], raw)) {
      throw ParseError(path.string(), line, "expected node id and " + std::to_string(channels) + " values");
    }
    auto it = index.find(raw);
    if (it == index.end()) throw ParseError(path.string(), line, "unknown node " + std::string(f[0]));
    if (seen[it->second]) throw ParseError(path.string(), line, "duplicate node " + std::string(f[0]));
    seen[it->second] = true;
    for (std::size_t c = 0; c < channels; ++c) {
      double v = 0.0;
      if (!parse_number(f[c + 1], v)) throw ParseError(path.string(), line, "bad value");
      x(it->second, static_cast<Eigen::Index>(c)) = v;
    }
  });
  for (std::size_t c = 0; c < raw_ids.size(); ++c) {
    if (!seen[c]) throw InvalidInput(path.string() + ": node " + std::to_string(raw_ids[c]) + " has no signal row");
  }
  return x;
}

void write_signal_tsv(const fs::path& path, const Signal& x, std::span<const std::int64_t> raw_ids) {
  if (static_cast<std::size_t>(x.rows()) != raw_ids.size()) throw InvalidInput("signal rows do not match id map");
  auto out = open_out(path);
  out << "node";
  for (Eigen::Index c = 0; c < x.cols(); ++c) out << "\tf" << c;
  out << '\n';
  for (Eigen::Index u = 0; u < x.rows(); ++u) {
    out << raw_ids[u];
    for (Eigen::Index c = 0; c < x.cols(); ++c) out << '\t' << format_double(x(u, c));
    out << '\n';
  }
  close_out(out, path);
}

std::vector<NodeId> read_node_set(const fs::path& path, std::span<const std::int64_t> raw_ids) {
  const auto index = compact_index(raw_ids);
  const std::string text = read_text(path);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<NodeId> out;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_tabs(line);
    if (fields.empty() || fields.front().starts_with('#')) continue;
    std::int64_t raw = 0;
    if (fields.size() != 1 || !parse_number(fields[0], raw)) {
      throw ParseError(path.string(), line_no, "expected one node id per line");
    }
    auto it = index.find(raw);
    if (it == index.end()) throw ParseError(path.string(), line_no, "unknown node " + std::string(fields[0]));
    out.push_back(it->second);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void write_diff_tsv(const fs::path& path, const DiffHeatmap& heatmap) {
  auto out = open_out(path);
  out << "u\tv\tdiff\n";
  for (const Entry& e : heatmap.cells) out << e.row << '\t' << e.col << '\t' << format_double(e.weight) << '\n';
  close_out(out, path);
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  close_out(out, path);
}

json to_json(const OperatorMeta& meta) {
  json j = {
      {"n", meta.n},
      {"K", meta.max_hop},
      {"mode", std::string(to_string(meta.mode))},
      {"seed", meta.seed},
      {"workers", meta.workers},
      {"budget_samples", meta.budget_samples},
      {"total_samples", meta.total_samples},
      {"symmetrized", meta.symmetrized},
      {"signed_coefficients", meta.signed_coefficients},
      {"warnings", meta.warnings},
  };
  j["ec"] = meta.ec ? json(*meta.ec) : json(nullptr);
  return j;
}

json to_json(const SimilarityReport& r) {
  json j = {
      {"n", r.n},
      {"frob_abs_err", r.frob_abs_err},
      {"frob_rel_err", r.frob_rel_err},
      {"max_abs_err", r.max_abs_err},
      {"quad_ratios", r.quad_ratios},
      {"rejected_probes", r.rejected_probes},
      {"guarantee_heuristic", r.guarantee_heuristic},
  };
  if (!r.quad_ratios.empty()) {
    auto [lo, hi] = std::minmax_element(r.quad_ratios.begin(), r.quad_ratios.end());
    j["quad_ratio_min"] = *lo;
    j["quad_ratio_max"] = *hi;
  }
  j["eig_bounds"] = r.eig_bounds ? json::array({r.eig_bounds->first, r.eig_bounds->second}) : json(nullptr);
  j["epsilon_hat"] = r.epsilon_hat ? json(*r.epsilon_hat) : json(nullptr);
  j["spectral_skipped"] = r.spectral_skipped.empty() ? json(nullptr) : json(r.spectral_skipped);
  return j;
}

json to_json(const LossReport& r) {
  return {
      {"loss_exact", r.loss_exact}, {"loss_approx", r.loss_approx}, {"abs_err", r.abs_err},
      {"rel_err", r.rel_err},       {"relative", r.relative},       {"alpha", r.alpha},
      {"K", r.max_hop},             {"M", r.samples},               {"seed", r.seed},
      {"nnz", r.nnz},               {"self_loops", r.self_loops},
  };
}

json to_json(const ZScoreTable& t) {
  json flagged = json::array();
  double max_abs_z = 0.0;
  for (const auto& e : t.entries) {
    if (std::isfinite(e.z)) max_abs_z = std::max(max_abs_z, std::abs(e.z));
    if (!e.flagged) continue;
    flagged.push_back({{"part", e.part},
                       {"u", e.row},
                       {"v", e.col},
                       {"exact", e.exact},
                       {"mean", e.mean},
                       {"std", e.stddev},
                       {"z", std::isfinite(e.z) ? json(e.z) : json(e.z > 0 ? "inf" : "-inf")}});
  }
  return {
      {"trials", t.trials},
      {"entries", t.entries.size()},
      {"within_3sigma", t.within_3sigma},
      {"fraction_within_3sigma", t.fraction_within_3sigma()},
      {"flagged", t.flagged},
      {"zero_variance_mismatches", t.zero_variance_mismatches},
      {"deterministic_bias", t.deterministic_bias()},
      {"max_abs_finite_z", max_abs_z},
      {"passed", t.passed()},
      {"flagged_entries", flagged},
  };
}

}  // namespace lapsparse
