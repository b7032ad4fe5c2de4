#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "coax/coax.h"

namespace fs = std::filesystem;

namespace {

// y = 2x + 5 with small noise and every tenth row pushed far off the line.
struct Columns {
  std::vector<std::vector<double>> cols;
  std::vector<const double*> ptrs;
};

Columns planted(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 100.0), noise(-2.0, 2.0), off(20.0, 100.0);
  Columns c;
  c.cols.assign(3, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    c.cols[0][i] = u(rng);
    c.cols[1][i] = 2.0 * c.cols[0][i] + 5.0 + noise(rng);
    if (i % 10 == 0) c.cols[1][i] += (i % 20 == 0 ? 1 : -1) * off(rng);
    c.cols[2][i] = u(rng);
  }
  for (const auto& col : c.cols) c.ptrs.push_back(col.data());
  return c;
}

std::vector<uint64_t> brute(const Columns& c, const double* lo, const double* hi) {
  std::vector<uint64_t> out;
  for (std::size_t i = 0; i < c.cols[0].size(); ++i) {
    bool in = true;
    for (std::size_t j = 0; j < c.cols.size(); ++j) in = in && lo[j] <= c.cols[j][i] && c.cols[j][i] <= hi[j];
    if (in) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST(CApi, StatusNamesAndLastError) {
  EXPECT_STREQ(coax_status_name(COAX_OK), "ok");
  coax_dataset* d = nullptr;
  EXPECT_EQ(coax_dataset_load_csv("/nonexistent.csv", nullptr, 0, &d), COAX_E_IO);
  EXPECT_EQ(d, nullptr);
  EXPECT_GT(std::strlen(coax_last_error()), 0u);
  EXPECT_EQ(coax_dataset_from_columns(nullptr, 1, 1, &d), COAX_E_INVALID_ARGUMENT);
  EXPECT_EQ(coax_index_build(nullptr, nullptr, nullptr), COAX_E_INVALID_ARGUMENT);
  coax_string_free(nullptr);
  coax_dataset_free(nullptr);
  coax_index_free(nullptr);
  coax_result_free(nullptr);
}

TEST(CApi, CsvLoadAllColumns) {
  const fs::path p = fs::temp_directory_path() / "coax_capi.csv";
  std::ofstream(p) << "a,b,c\n1,2,3\n4,x,6\n7,8,9\n";
  coax_dataset* d = nullptr;
  ASSERT_EQ(coax_dataset_load_csv(p.c_str(), nullptr, 0, &d), COAX_OK);
  EXPECT_EQ(coax_dataset_dims(d), 3u);
  EXPECT_EQ(coax_dataset_rows(d), 2u);
  EXPECT_EQ(coax_dataset_dropped_rows(d), 1u);
  coax_dataset_free(d);
  const char* bad[] = {"zz"};
  EXPECT_EQ(coax_dataset_load_csv(p.c_str(), bad, 1, &d), COAX_E_INVALID_ARGUMENT);
}

TEST(CApi, DetectBuildQuerySaveLoad) {
  const Columns c = planted(20000, 1);
  coax_dataset* d = nullptr;
  ASSERT_EQ(coax_dataset_from_columns(c.ptrs.data(), 3, 20000, &d), COAX_OK);

  coax_detect_config dc;
  coax_detect_config_default(&dc);
  char* models = nullptr;
  ASSERT_EQ(coax_detect(d, &dc, &models), COAX_OK);
  EXPECT_NE(std::string(models).find("\"predictor\""), std::string::npos);

  coax_build_config bc;
  coax_build_config_default(&bc);
  bc.cells_per_dim = 8;
  bc.models_json = models;
  coax_index* ix = nullptr;
  ASSERT_EQ(coax_index_build(d, &bc, &ix), COAX_OK) << coax_last_error();
  EXPECT_EQ(coax_index_dims(ix), 3u);
  char* stats = nullptr;
  ASSERT_EQ(coax_index_stats_json(ix, &stats), COAX_OK);
  EXPECT_NE(std::string(stats).find("\"dependent_dims\": 1"), std::string::npos) << stats;
  coax_string_free(stats);

  const fs::path snap = fs::temp_directory_path() / "coax_capi.cxi";
  ASSERT_EQ(coax_index_save(ix, snap.c_str()), COAX_OK);
  coax_index* loaded = nullptr;
  ASSERT_EQ(coax_index_load(snap.c_str(), &loaded), COAX_OK);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 210.0);
  for (int i = 0; i < 200; ++i) {
    double lo[3], hi[3];
    for (int j = 0; j < 3; ++j) {
      const double a = u(rng), b = u(rng);
      lo[j] = std::min(a, b);
      hi[j] = std::max(a, b);
    }
    if (i % 3 == 0) {
      lo[2] = -INFINITY;
      hi[2] = INFINITY;
    }
    const auto expected = brute(c, lo, hi);
    for (coax_index* which : {ix, loaded}) {
      coax_result* r = nullptr;
      ASSERT_EQ(coax_index_query(which, lo, hi, 3, &r), COAX_OK);
      std::vector<uint64_t> got(coax_result_rows(r), coax_result_rows(r) + coax_result_count(r));
      std::sort(got.begin(), got.end());
      EXPECT_EQ(got, expected);
      coax_query_stats s;
      coax_result_stats(r, &s);
      EXPECT_EQ(s.rows_returned, got.size());
      EXPECT_LE(s.rows_returned, s.rows_scanned);
      coax_result_free(r);
    }
  }
  double lo[2] = {0, 0}, hi[2] = {1, 1};
  coax_result* r = nullptr;
  EXPECT_EQ(coax_index_query(ix, lo, hi, 2, &r), COAX_E_INVALID_ARGUMENT);

  bc.models_json = "{broken";
  coax_index* bad = nullptr;
  EXPECT_EQ(coax_index_build(d, &bc, &bad), COAX_E_PARSE);
  EXPECT_EQ(coax_index_load("/nonexistent.cxi", &bad), COAX_E_IO);

  coax_string_free(models);
  coax_index_free(loaded);
  coax_index_free(ix);
  coax_dataset_free(d);
}

TEST(CApi, BenchAndTheory) {
  const Columns c = planted(5000, 2);
  coax_dataset* d = nullptr;
  ASSERT_EQ(coax_dataset_from_columns(c.ptrs.data(), 3, 5000, &d), COAX_OK);
  coax_bench_config cfg;
  coax_bench_config_default(&cfg);
  const uint32_t cells[] = {4, 8};
  cfg.cells_per_dim = cells;
  cfg.n_cells = 2;
  cfg.n_queries = 50;
  cfg.workload_k = 20;
  cfg.include_timing = 0;
  char* a = nullptr;
  char* b = nullptr;
  ASSERT_EQ(coax_bench(d, &cfg, &a), COAX_OK) << coax_last_error();
  ASSERT_EQ(coax_bench(d, &cfg, &b), COAX_OK);
  EXPECT_STREQ(a, b);
  EXPECT_EQ(std::string(a).find("timing"), std::string::npos);
  EXPECT_NE(std::string(a).find("\"valid\": true"), std::string::npos);
  coax_string_free(a);
  coax_string_free(b);
  cfg.query_kinds = 0;
  EXPECT_EQ(coax_bench(d, &cfg, &a), COAX_E_INVALID_ARGUMENT);
  coax_dataset_free(d);

  coax_theory_config tc;
  coax_theory_config_default(&tc);
  const double eps[] = {5};
  tc.eps_over_sigma = eps;
  tc.n_eps = 1;
  tc.trials = 100;
  tc.n = 10000;
  char* t1 = nullptr;
  char* t2 = nullptr;
  ASSERT_EQ(coax_theory_report(&tc, &t1), COAX_OK) << coax_last_error();
  ASSERT_EQ(coax_theory_report(&tc, &t2), COAX_OK);
  EXPECT_STREQ(t1, t2);
  coax_string_free(t1);
  coax_string_free(t2);
  tc.sigma = -1;
  EXPECT_NE(coax_theory_report(&tc, &t1), COAX_OK);
}
