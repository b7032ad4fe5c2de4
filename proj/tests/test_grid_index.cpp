#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "coax/error.hpp"
#include "coax/grid_index.hpp"
#include "support/synth.hpp"

using namespace coax;
using coax::testing::random_rect;

namespace {

std::vector<RowId> sorted(std::vector<RowId> v) {
  std::sort(v.begin(), v.end());
  return v;
}

double brute_quantile(std::vector<double> v, double level) {
  std::sort(v.begin(), v.end());
  const double pos = level * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (pos - static_cast<double>(i)) * (v[i + 1] - v[i]);
}

// Cells whose half-open box [b_{k-1}, b_k) meets q clipped to the data bounds.
std::size_t brute_cells_meeting(const GridIndex& g, const QueryRect& q) {
  for (std::size_t dim = 0; dim < g.n_dims(); ++dim) {
    if (!q[dim].intersects(g.bounds()[dim])) return 0;
  }
  std::size_t total = 1;
  for (std::size_t k = 0; k < g.grid_dims().size(); ++k) {
    const std::size_t dim = g.grid_dims()[k];
    const Interval clip = q[dim].intersect(g.bounds()[dim]);
    const auto& b = g.boundaries()[k];
    std::size_t meeting = 0;
    for (std::size_t c = 0; c <= b.size(); ++c) {
      const double lo = c == 0 ? -kInf : b[c - 1];
      const double hi = c == b.size() ? kInf : b[c];
      if (clip.lo < hi && clip.hi >= lo) ++meeting;
    }
    total *= meeting;
  }
  return total;
}

Dataset random_dataset(std::mt19937_64& rng) {
  const std::size_t n = 1 + rng() % 1000, dims = 1 + rng() % 5;
  std::vector<std::vector<double>> cols(dims, std::vector<double>(n));
  for (auto& c : cols) {
    const int kind = static_cast<int>(rng() % 4);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    std::lognormal_distribution<double> ln(0.0, 1.5);
    for (auto& v : c) {
      switch (kind) {
        case 0: v = u(rng); break;
        case 1: v = ln(rng); break;
        case 2: v = static_cast<double>(rng() % 5); break;  // heavy ties
        default: v = 7.0; break;                              // constant
      }
    }
  }
  return Dataset(std::move(cols));
}

GridConfig random_config(std::size_t dims, std::mt19937_64& rng) {
  GridConfig cfg;
  std::vector<std::size_t> all(dims);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::shuffle(all.begin(), all.end(), rng);
  const bool sorted_cells = rng() % 3 != 0;
  if (sorted_cells) {
    cfg.sort_dim = all.back();
    all.pop_back();
  }
  all.resize(all.empty() ? 0 : rng() % (all.size() + 1));
  cfg.grid_dims = all;
  cfg.cells_per_dim = 1 + rng() % 9;
  cfg.mode = rng() % 2 ? GridMode::Quantile : GridMode::Uniform;
  return cfg;
}

double coefficient_of_variation(const GridIndex& g) {
  double mean = 0.0;
  for (const auto& c : g.cells()) mean += static_cast<double>(c.count);
  mean /= static_cast<double>(g.n_cells());
  double var = 0.0;
  for (const auto& c : g.cells()) var += (static_cast<double>(c.count) - mean) * (static_cast<double>(c.count) - mean);
  return std::sqrt(var / static_cast<double>(g.n_cells())) / mean;
}

}  // namespace

TEST(GridBuild, QuantileBoundaries) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<double> x(100), y(100);
  for (auto& v : x) v = u(rng);
  for (auto& v : y) v = u(rng);
  const Dataset d({x, y});
  const GridIndex g = GridIndex::build(d, {.grid_dims = {0}, .sort_dim = 1, .cells_per_dim = 4});
  ASSERT_EQ(g.boundaries()[0].size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(g.boundaries()[0][i], brute_quantile(x, (i + 1) / 4.0));
    EXPECT_NEAR(g.boundaries()[0][i], 25.0 * (i + 1), 12.0);
  }
  ASSERT_EQ(g.n_cells(), 4u);
  for (const auto& c : g.cells()) EXPECT_NEAR(static_cast<double>(c.count), 25.0, 2.0);
}

TEST(GridBuild, UniformBoundaries) {
  const Dataset d(std::vector<std::vector<double>>{{0, 1, 2, 3, 4, 5, 6, 7, 8, 10}});
  const GridIndex g = GridIndex::build(d, {.grid_dims = {0}, .cells_per_dim = 5, .mode = GridMode::Uniform});
  EXPECT_EQ(g.boundaries()[0], (std::vector<double>{2, 4, 6, 8}));
}

TEST(GridBuild, EmptyGridIsOneSortedCell) {
  const Dataset d(std::vector<std::vector<double>>{{5, 3, 9, 1, 3}, {0, 1, 2, 3, 4}});
  const GridIndex g = GridIndex::build(d, {.grid_dims = {}, .sort_dim = 0});
  ASSERT_EQ(g.n_cells(), 1u);
  EXPECT_EQ(g.directory_bytes(), kCellDescriptorBytes);
  std::vector<double> order;
  for (std::size_t p = 0; p < g.n_rows(); ++p) order.push_back(g.row(p)[0]);
  EXPECT_EQ(order, (std::vector<double>{1, 3, 3, 5, 9}));
  // Ties keep row-id order.
  EXPECT_EQ(g.row_ids()[1], 1u);
  EXPECT_EQ(g.row_ids()[2], 4u);
}

TEST(GridBuild, ConstantColumnCollapses) {
  const Dataset d(std::vector<std::vector<double>>{std::vector<double>(50, 4.0), std::vector<double>(50, 1.0)});
  const GridIndex g = GridIndex::build(d, {.grid_dims = {0}, .sort_dim = 1, .cells_per_dim = 8});
  EXPECT_TRUE(g.boundaries()[0].empty());
  EXPECT_EQ(g.n_cells(), 1u);
}

TEST(GridBuild, Errors) {
  const Dataset d(std::vector<std::vector<double>>{{1, 2}, {3, 4}});
  EXPECT_THROW(GridIndex::build(d, std::vector<RowId>{}, {.grid_dims = {0}}), Error);
  EXPECT_THROW(GridIndex::build(d, {.grid_dims = {0}, .sort_dim = 0}), Error);
  EXPECT_THROW(GridIndex::build(d, {.grid_dims = {2}}), Error);
  EXPECT_THROW(GridIndex::build(d, {.grid_dims = {0, 0}}), Error);
  EXPECT_THROW(GridIndex::build(d, {.grid_dims = {0}, .cells_per_dim = 0}), Error);
  const Dataset wide = coax::testing::make_uniform(1000, 6, 1);
  try {
    build_uniform_grid(wide, 64);
    FAIL() << "expected a capacity error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Capacity);
  }
}

TEST(GridQuery, UniversalAndDisjoint) {
  const Dataset d = coax::testing::make_uniform(500, 3, 4);
  const GridIndex g = build_column_files(d, 0, 4);
  const auto all = g.range_query(QueryRect(3));
  EXPECT_EQ(all.rows.size(), 500u);
  EXPECT_EQ(all.stats.rows_scanned, 500u);
  EXPECT_EQ(all.stats.rows_returned, 500u);

  QueryRect outside(3);
  outside[1] = {1000, 2000};
  const auto none = g.range_query(outside);
  EXPECT_TRUE(none.rows.empty());
  EXPECT_EQ(none.stats.cells_visited, 0u);
  EXPECT_THROW(g.range_query(QueryRect(2)), Error);
}

TEST(GridQuery, PointQueries) {
  std::vector<double> x{1, 2, 2, 2, 3, 4}, y{5, 6, 6, 6, 7, 8};
  const Dataset d({x, y});
  const GridIndex g = build_column_files(d, 1, 3);
  EXPECT_EQ(sorted(g.point_query({2, 6}).rows), (std::vector<RowId>{1, 2, 3}));
  EXPECT_EQ(g.point_query({4, 8}).rows, (std::vector<RowId>{5}));
  EXPECT_TRUE(g.point_query({2, 7}).rows.empty());
  EXPECT_TRUE(g.point_query({2.5, 6}).rows.empty());
}

TEST(FullScan, Examples) {
  const Dataset d = coax::testing::make_uniform(100, 2, 5);
  std::vector<RowId> ids(100);
  std::iota(ids.begin(), ids.end(), RowId{0});
  EXPECT_EQ(full_scan(d, QueryRect(2)), ids);
  EXPECT_TRUE(full_scan(d, std::vector<RowId>{}, QueryRect(2)).empty());
  std::vector<RowId> subset{3, 9, 50};
  EXPECT_EQ(full_scan(d, subset, QueryRect(2)), subset);
}

TEST(DirectoryBytes, Accounting) {
  const Dataset d = coax::testing::make_uniform(5000, 3, 6);
  const GridIndex g = GridIndex::build(d, {.grid_dims = {0, 1}, .sort_dim = 2, .cells_per_dim = 10});
  ASSERT_EQ(g.n_cells(), 100u);
  EXPECT_EQ(g.directory_bytes(), 100 * kCellDescriptorBytes + 18 * kBoundaryBytes);
  const std::vector<std::size_t> plan{10, 10};
  EXPECT_EQ(planned_directory_bytes(plan), g.directory_bytes());

  const GridIndex g2 = GridIndex::build(d, {.grid_dims = {0, 1}, .sort_dim = 2, .cells_per_dim = 20});
  const double ratio = static_cast<double>(g2.n_cells() * kCellDescriptorBytes) /
                       static_cast<double>(g.n_cells() * kCellDescriptorBytes);
  EXPECT_DOUBLE_EQ(ratio, 4.0);
}

// Range queries agree with the full scan on randomized datasets, layouts and
// rectangles, and visit exactly the cells whose boxes meet the query.
TEST(GridQuery, OracleEquivalenceAndPruning) {
  std::mt19937_64 rng(2024);
  std::size_t cases = 0;
  for (int ds = 0; ds < 120; ++ds) {
    const Dataset d = random_dataset(rng);
    const GridConfig cfg = random_config(d.n_dims(), rng);
    const GridIndex g = GridIndex::build(d, cfg);
    for (int qi = 0; qi < 12; ++qi, ++cases) {
      const QueryRect q = random_rect(d, rng);
      const auto res = g.range_query(q);
      ASSERT_EQ(sorted(res.rows), full_scan(d, q)) << "dataset " << ds << " query " << qi;
      EXPECT_EQ(res.stats.rows_returned, res.rows.size());
      EXPECT_LE(res.stats.rows_returned, res.stats.rows_scanned);
      EXPECT_EQ(res.stats.cells_visited, brute_cells_meeting(g, q));
    }
    // Point query at a stored record finds at least that record.
    const RowId r = rng() % d.n_rows();
    std::vector<double> p(d.n_dims());
    for (std::size_t j = 0; j < d.n_dims(); ++j) p[j] = d.at(r, j);
    const auto hit = g.point_query(p).rows;
    EXPECT_NE(std::find(hit.begin(), hit.end(), r), hit.end());
  }
  EXPECT_GE(cases, 1000u);
}

TEST(GridBuild, CellMembershipAndInCellOrder) {
  std::mt19937_64 rng(77);
  for (int ds = 0; ds < 60; ++ds) {
    const Dataset d = random_dataset(rng);
    const GridConfig cfg = random_config(d.n_dims(), rng);
    const GridIndex g = GridIndex::build(d, cfg);
    std::vector<RowId> ids(g.row_ids().begin(), g.row_ids().end());
    ASSERT_EQ(sorted(ids).size(), d.n_rows());
    for (std::size_t c = 0; c < g.n_cells(); ++c) {
      const auto& cell = g.cells()[c];
      for (std::size_t p = cell.begin; p < cell.begin + cell.count; ++p) {
        EXPECT_EQ(g.cell_address(g.row(p)), c);
        EXPECT_EQ(g.row(p)[0], d.at(g.row_ids()[p], 0));
        if (cfg.sort_dim && p > cell.begin) {
          EXPECT_LE(g.row(p - 1)[*cfg.sort_dim], g.row(p)[*cfg.sort_dim]);
        }
      }
    }
  }
}

// With one cell the scanned count is exactly the number of rows the two
// binary searches bracket, which a linear pass over the sort column reproduces.
TEST(GridQuery, BinarySearchBoundsMatchLinearScan) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Dataset d = random_dataset(rng);
    const std::size_t s = rng() % d.n_dims();
    const GridIndex g = GridIndex::build(d, {.grid_dims = {}, .sort_dim = s});
    const QueryRect q = random_rect(d, rng);
    const auto res = g.range_query(q);
    if (res.stats.cells_visited == 0) continue;
    const auto col = d.column(s);
    const auto expected = std::count_if(col.begin(), col.end(), [&](double v) { return q[s].contains(v); });
    EXPECT_EQ(res.stats.rows_scanned, static_cast<std::size_t>(expected));
  }
}

TEST(GridBuild, QuantileCellsAreMoreEvenOnSkewedData) {
  const Dataset d = coax::testing::make_independent(50000, 2, 12, [](auto& rng) {
    return std::lognormal_distribution<double>(0.0, 1.0)(rng);
  });
  for (std::size_t cells : {4, 8, 16}) {
    const GridIndex q = GridIndex::build(d, {.grid_dims = {0, 1}, .cells_per_dim = cells, .mode = GridMode::Quantile});
    const GridIndex u = GridIndex::build(d, {.grid_dims = {0, 1}, .cells_per_dim = cells, .mode = GridMode::Uniform});
    EXPECT_LE(coefficient_of_variation(q), coefficient_of_variation(u)) << cells;
  }
}

TEST(GridBuild, Baselines) {
  const Dataset d = coax::testing::make_uniform(2000, 4, 3);
  const GridIndex cf = build_column_files(d, 2, 5);
  EXPECT_EQ(cf.grid_dims(), (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(cf.sort_dim(), std::optional<std::size_t>(2));
  EXPECT_EQ(cf.mode(), GridMode::Quantile);
  const GridIndex ug = build_uniform_grid(d, 5);
  EXPECT_EQ(ug.grid_dims(), (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_FALSE(ug.sort_dim().has_value());
  EXPECT_EQ(ug.mode(), GridMode::Uniform);
}

TEST(GridSnapshot, RoundTripAndTruncation) {
  const Dataset d = coax::testing::make_uniform(3000, 3, 13);
  const GridIndex g = build_column_files(d, 1, 6);
  std::stringstream buf;
  g.write(buf);
  const std::string bytes = buf.str();
  std::istringstream in(bytes);
  const GridIndex back = GridIndex::read(in);
  EXPECT_EQ(back.boundaries(), g.boundaries());
  EXPECT_EQ(back.directory_bytes(), g.directory_bytes());
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const QueryRect q = random_rect(d, rng);
    EXPECT_EQ(back.range_query(q).rows, g.range_query(q).rows);
  }
  std::istringstream cut(bytes.substr(0, bytes.size() / 2));
  try {
    GridIndex::read(cut);
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
  }
}
