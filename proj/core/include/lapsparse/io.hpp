#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lapsparse/oracle.hpp"
#include "lapsparse/propagation.hpp"
#include "lapsparse/sparse_matrix.hpp"
#include "lapsparse/sparsifier.hpp"

namespace lapsparse {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// "u\tv\tweight" header followed by one entry per line in canonical order.
void write_operator_tsv(const std::filesystem::path& path, const SparseMatrix& m);
SparseMatrix read_operator_tsv(const std::filesystem::path& path, std::size_t n);

/// Path of hop k's file: "<base>.hop<k>".
std::filesystem::path hop_path(const std::filesystem::path& base, unsigned k);
/// Writes one TSV per hop and returns their paths.
std::vector<std::filesystem::path> write_partitioned_tsv(const std::filesystem::path& base,
                                                         const HopPartitionedOperator& op);

/// "raw_id\tcompact_id" per node.
void write_id_map(const std::filesystem::path& path, std::span<const std::int64_t> raw_ids);

/// Signals: header "node f0 f1 ...", then one row per node keyed by raw id.
/// Every node must appear exactly once.
Signal read_signal_tsv(const std::filesystem::path& path, std::span<const std::int64_t> raw_ids);
void write_signal_tsv(const std::filesystem::path& path, const Signal& x,
                      std::span<const std::int64_t> raw_ids);

/// One raw node id per line; the result is sorted and de-duplicated.
std::vector<NodeId> read_node_set(const std::filesystem::path& path,
                                  std::span<const std::int64_t> raw_ids);

/// "u\tv\tdiff" with diffs clipped to the heatmap's display range.
void write_diff_tsv(const std::filesystem::path& path, const DiffHeatmap& heatmap);

/// Writes `j` pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
std::string read_text(const std::filesystem::path& path);

nlohmann::json to_json(const OperatorMeta& meta);
nlohmann::json to_json(const SimilarityReport& report);
nlohmann::json to_json(const LossReport& report);
/// Summary plus the flagged entries; the full table can be large.
nlohmann::json to_json(const ZScoreTable& table);

}  // namespace lapsparse
