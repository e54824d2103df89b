#include <cmath>

#include <gtest/gtest.h>

#include "lapsparse/error.hpp"
#include "lapsparse/io.hpp"
#include "lapsparse/rng.hpp"
#include "support/graphs.hpp"
#include "support/temp_dir.hpp"

namespace lapsparse {
namespace {

using testing::TempDir;

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-2.5e-300), "-2.5e-300");
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, static_cast<double>(rng.below(40)) - 20.0);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(OperatorTsv, RoundTripIsExact) {
  TempDir dir;
  const Graph g = random_graph(40, 4.0, 1, false);
  SamplerConfig cfg;
  cfg.budget = SampleCount{700};
  const auto op = slsgc(g, CoeffVector({0.3, 0.3, 0.4}), cfg);
  write_operator_tsv(dir / "op.tsv", op.matrix);
  EXPECT_EQ(read_operator_tsv(dir / "op.tsv", 40), op.matrix);
  const std::string text = read_text(dir / "op.tsv");
  EXPECT_TRUE(text.starts_with("u\tv\tweight\n"));
  EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(OperatorTsv, MalformedRowsReportLine) {
  TempDir dir;
  const auto p = dir.write("bad.tsv", "u\tv\tweight\n0\t1\t0.5\n0\tx\t1\n");
  try {
    read_operator_tsv(p, 3);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(read_operator_tsv(dir.write("oob.tsv", "u\tv\tweight\n0\t9\t1\n"), 3), ParseError);
  EXPECT_THROW(read_operator_tsv(dir / "missing.tsv", 3), IoError);
}

TEST(PartitionedTsv, OneFilePerHop) {
  TempDir dir;
  SamplerConfig cfg;
  cfg.mode = SamplingMode::kLearnable;
  cfg.budget = SampleCount{100};
  const auto op = glsgc(testing::star(5), 2, cfg);
  const auto paths = write_partitioned_tsv(dir / "op", op);
  ASSERT_EQ(paths.size(), 3u);
  EXPECT_EQ(paths[2].filename(), "op.hop2");
  for (unsigned k = 0; k < 3; ++k) EXPECT_EQ(read_operator_tsv(paths[k], 6), op.hops[k]);
}

TEST(SignalTsv, RoundTripKeyedByRawIds) {
  TempDir dir;
  const std::vector<std::int64_t> raw{10, 3, 7};
  Signal x(3, 2);
  x << 1.5, -2, 0.25, 0, 1e-9, 3;
  write_signal_tsv(dir / "x.tsv", x, raw);
  EXPECT_EQ(read_signal_tsv(dir / "x.tsv", raw), x);

  const auto shuffled = dir.write("y.tsv", "node\tf0\n7\t3\n10\t1\n3\t2\n");
  const Signal y = read_signal_tsv(shuffled, raw);
  EXPECT_EQ(y(0, 0), 1);
  EXPECT_EQ(y(1, 0), 2);
  EXPECT_EQ(y(2, 0), 3);
  EXPECT_THROW(read_signal_tsv(dir.write("z.tsv", "node\tf0\n7\t3\n"), raw), InvalidInput);
  EXPECT_THROW(read_signal_tsv(dir.write("w.tsv", "node\tf0\n99\t3\n"), raw), ParseError);
}

TEST(NodeSet, SortedUniqueCompactIds) {
  TempDir dir;
  const std::vector<std::int64_t> raw{10, 3, 7};
  const auto set = read_node_set(dir.write("u.txt", "7\n# c\n10\n7\n"), raw);
  EXPECT_EQ(set, (std::vector<NodeId>{0, 2}));
  EXPECT_THROW(read_node_set(dir.write("v.txt", "4\n"), raw), ParseError);
}

TEST(Labels, LoadAndMismatch) {
  TempDir dir;
  const auto loaded = parse_edge_list("5 6\n6 7\n", false);
  const LabelMap labels = load_labels(dir.write("l.txt", "7 1\n5 0\n6 0\n"), loaded.raw_ids);
  EXPECT_EQ(labels.labels, (std::vector<std::int64_t>{0, 0, 1}));
  EXPECT_DOUBLE_EQ(edge_homophily(loaded.graph, labels), 0.5);
  EXPECT_THROW(load_labels(dir.write("m.txt", "5 0\n6 0\n"), loaded.raw_ids), InvalidInput);
}

TEST(Json, MetaAndReportsSerialize) {
  OperatorMeta meta;
  meta.n = 4;
  meta.ec = 0.5;
  const auto j = to_json(meta);
  EXPECT_EQ(j.at("mode"), "static");
  EXPECT_EQ(j.at("ec"), 0.5);
  ZScoreTable table;
  table.trials = 30;
  table.entries.push_back({0, 0, 0, 1.0, 2.0, 0.0, std::numeric_limits<double>::infinity(), true});
  table.flagged = 1;
  table.zero_variance_mismatches = 1;
  const auto t = to_json(table);
  EXPECT_EQ(t.at("passed"), false);
  EXPECT_EQ(t.at("flagged_entries").size(), 1u);
  EXPECT_EQ(t.at("flagged_entries")[0].at("z"), "inf");
}

}  // namespace
}  // namespace lapsparse
