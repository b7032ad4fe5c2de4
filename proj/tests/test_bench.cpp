#include <gtest/gtest.h>

#include <algorithm>
#include <json.hpp>

#include "coax/bench.hpp"
#include "coax/error.hpp"
#include "coax/grid_index.hpp"
#include "coax/workload.hpp"
#include "support/synth.hpp"

using namespace coax;
using coax::testing::make_planted;

namespace {

QueryRect bounding_box(const Dataset& d) {
  QueryRect q(d.n_dims());
  for (std::size_t j = 0; j < d.n_dims(); ++j) {
    const auto col = d.column(j);
    const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
    q[j] = {*mn, *mx};
  }
  return q;
}

IndexSpec spec(IndexKind kind, std::size_t cells = 8) {
  IndexSpec s;
  s.kind = kind;
  s.cells_per_dim = cells;
  s.coax.detect.target_ratio = 0.9;
  return s;
}

}  // namespace

TEST(Workload, KindsAndNames) {
  EXPECT_STREQ(to_string(QueryKind::Point), "point");
  EXPECT_EQ(parse_query_kind("range"), QueryKind::Range);
  EXPECT_THROW(parse_query_kind("box"), Error);
  EXPECT_EQ(parse_index_kind("columnfiles"), IndexKind::ColumnFiles);
  EXPECT_STREQ(to_string(IndexKind::UniformGrid), "uniformgrid");
  EXPECT_THROW(parse_index_kind("rtree"), Error);
}

TEST(Workload, NeighbourhoodRectangles) {
  const Dataset d = coax::testing::make_uniform(2000, 3, 1);
  const Workload w1 = gen_workload(d, 1, 50, QueryKind::Range, 3);
  for (const auto& q : w1.queries) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(q[j].lo, q[j].hi);
    EXPECT_GE(full_scan(d, q).size(), 1u);
  }
  const Workload wn = gen_workload(d, d.n_rows(), 3, QueryKind::Range, 3);
  for (const auto& q : wn.queries) EXPECT_EQ(q.intervals(), bounding_box(d).intervals());

  for (std::size_t k : {10, 100}) {
    const Workload w = gen_workload(d, k, 100, QueryKind::Range, 4);
    EXPECT_EQ(w.queries.size(), 100u);
    for (const auto& q : w.queries) {
      EXPECT_FALSE(q.empty());
      EXPECT_GE(full_scan(d, q).size(), k);
    }
  }
  const Workload pts = gen_workload(d, 100, 40, QueryKind::Point, 4);
  for (const auto& q : pts.queries) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(q[j].lo, q[j].hi);
    EXPECT_GE(full_scan(d, q).size(), 1u);
  }
}

TEST(Workload, DeterministicAndSeedRows) {
  const Dataset d = coax::testing::make_uniform(1000, 2, 2);
  const Workload a = gen_workload(d, 20, 30, QueryKind::Range, 9);
  const Workload b = gen_workload(d, 20, 30, QueryKind::Range, 9);
  for (std::size_t i = 0; i < a.queries.size(); ++i) EXPECT_EQ(a.queries[i].intervals(), b.queries[i].intervals());

  const std::vector<RowId> seeds{7};
  const Workload p = gen_workload(d, 1, 5, QueryKind::Point, 1, std::span<const RowId>(seeds));
  for (const auto& q : p.queries) {
    EXPECT_EQ(q[0].lo, d.at(7, 0));
    EXPECT_EQ(q[1].lo, d.at(7, 1));
  }
  EXPECT_THROW(gen_workload(d, 0, 5, QueryKind::Range, 1), Error);
}

TEST(RunBench, RequiresFullScanAndChecksEverything) {
  const auto p = make_planted({.n_rows = 20000, .n_dims = 4, .fds = {{0, 1, 2.0, 5.0}}, .seed = 31});
  const std::vector<Workload> w{gen_workload(p.data, 100, 200, QueryKind::Range, 5),
                                gen_workload(p.data, 1, 100, QueryKind::Point, 6)};
  EXPECT_THROW(run_bench(p.data, w, {spec(IndexKind::Coax)}), Error);

  const BenchReport r = run_bench(
      p.data, w, {spec(IndexKind::FullScan), spec(IndexKind::Coax), spec(IndexKind::ColumnFiles),
                  spec(IndexKind::UniformGrid)});
  EXPECT_TRUE(r.valid());
  ASSERT_EQ(r.runs.size(), 8u);
  const IndexRun* coax_run = nullptr;
  const IndexRun* cf_run = nullptr;
  for (const auto& run : r.runs) {
    EXPECT_TRUE(run.correct) << run.name;
    EXPECT_TRUE(run.skipped.empty());
    if (run.workload != QueryKind::Range) continue;
    if (run.kind == IndexKind::FullScan) {
      EXPECT_EQ(run.rows_scanned_total, 200u * 20000u);
      EXPECT_EQ(run.directory_bytes, 0u);
    }
    if (run.kind == IndexKind::Coax) coax_run = &run;
    if (run.kind == IndexKind::ColumnFiles) cf_run = &run;
  }
  ASSERT_TRUE(coax_run && cf_run);
  EXPECT_LT(coax_run->directory_bytes, cf_run->directory_bytes);
  EXPECT_EQ(coax_run->rows_returned_total, cf_run->rows_returned_total);
}

TEST(RunBench, CapacityBecomesSkipped) {
  const Dataset d = coax::testing::make_uniform(500, 6, 3);
  const std::vector<Workload> w{gen_workload(d, 10, 10, QueryKind::Range, 1)};
  const BenchReport r = run_bench(d, w, {spec(IndexKind::FullScan), spec(IndexKind::UniformGrid, 64)});
  ASSERT_EQ(r.runs.size(), 2u);
  EXPECT_FALSE(r.runs[1].skipped.empty());
  EXPECT_TRUE(r.valid());
  const auto doc = nlohmann::json::parse(report_to_json(r, false));
  EXPECT_TRUE(doc["indexes"][1].contains("skipped"));
}

TEST(RunBench, ScannedRowsGrowWithNeighbourhoodSize) {
  const auto p = make_planted({.n_rows = 20000, .n_dims = 3, .fds = {{0, 1, 1.0, 0.0}}, .seed = 32});
  std::size_t previous = 0;
  for (std::size_t k : {10, 100, 1000, 10000}) {
    const std::vector<Workload> w{gen_workload(p.data, k, 50, QueryKind::Range, 8)};
    const BenchReport r = run_bench(p.data, w, {spec(IndexKind::FullScan), spec(IndexKind::Coax)});
    ASSERT_TRUE(r.valid());
    const std::size_t scanned = r.runs[1].rows_scanned_total;
    EXPECT_GT(scanned, previous) << k;
    previous = scanned;
  }
}

TEST(RunBench, JsonIsDeterministicWithoutTiming) {
  const auto p = make_planted({.n_rows = 5000, .n_dims = 4, .fds = {{0, 1, 2.0, 5.0}}, .seed = 33});
  const std::vector<Workload> w{gen_workload(p.data, 50, 100, QueryKind::Range, 2)};
  const std::vector<IndexSpec> specs{spec(IndexKind::FullScan), spec(IndexKind::Coax), spec(IndexKind::ColumnFiles)};
  const BenchReport a = run_bench(p.data, w, specs);
  BenchOptions threaded;
  threaded.threads = 4;
  const BenchReport b = run_bench(p.data, w, specs, threaded);
  EXPECT_EQ(report_to_json(a, false), report_to_json(b, false));

  const auto doc = nlohmann::json::parse(report_to_json(a, true));
  EXPECT_EQ(doc["environment"]["n_rows"], 5000);
  EXPECT_TRUE(doc["valid"].get<bool>());
  for (const auto& ix : doc["indexes"]) {
    EXPECT_EQ(ix["correctness"], "pass");
    EXPECT_TRUE(ix.contains("timing"));
    EXPECT_GE(ix["timing"]["p99_query_us"].get<double>(), ix["timing"]["median_query_us"].get<double>());
  }
  const auto bare = nlohmann::json::parse(report_to_json(a, false));
  for (const auto& ix : bare["indexes"]) EXPECT_FALSE(ix.contains("timing"));
}
