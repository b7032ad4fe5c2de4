// Command-line front end over the C API.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coax/coax.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCorrectness = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Frees a C API handle on scope exit.
template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};

using DatasetHandle = Handle<coax_dataset, coax_dataset_free>;
using IndexHandle = Handle<coax_index, coax_index_free>;
using ResultHandle = Handle<coax_result, coax_result_free>;

struct OwnedString {
  char* p = nullptr;
  OwnedString() = default;
  OwnedString(const OwnedString&) = delete;
  OwnedString& operator=(const OwnedString&) = delete;
  ~OwnedString() { coax_string_free(p); }
};

void check(coax_status s) {
  if (s != COAX_OK) throw std::runtime_error(std::string(coax_status_name(s)) + ": " + coax_last_error());
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void load_dataset(const std::string& csv, const std::string& dims, DatasetHandle& d) {
  const auto sel = split_list(dims);
  std::vector<const char*> ptrs;
  for (const auto& s : sel) ptrs.push_back(s.c_str());
  const coax_status st = coax_dataset_load_csv(csv.c_str(), ptrs.data(), ptrs.size(), &d.p);
  if (st == COAX_E_INVALID_ARGUMENT) throw UsageError(coax_last_error());
  check(st);
  if (coax_dataset_dropped_rows(d.p) > 0) {
    std::cerr << "note: dropped " << coax_dataset_dropped_rows(d.p) << " rows with non-numeric fields\n";
  }
}

struct DetectFlags {
  uint64_t sample = 100000;
  uint32_t chunks = 100;
  double threshold = 0.0;
  double target_ratio = 0.9;
  uint64_t seed = 42;

  void add(CLI::App* cmd) {
    cmd->add_option("--sample", sample, "Rows sampled for detection")->check(CLI::PositiveNumber);
    cmd->add_option("--chunks", chunks, "Buckets per axis")->check(CLI::Range(2u, 100000u));
    cmd->add_option("--threshold", threshold, "Dense-cell threshold (default: automatic)");
    cmd->add_option("--target-ratio", target_ratio, "Fraction of points inside the margins")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--seed", seed, "Sampling seed");
  }

  coax_detect_config config() const {
    coax_detect_config c;
    coax_detect_config_default(&c);
    c.sample_count = sample;
    c.chunks = chunks;
    c.threshold = threshold;
    c.target_ratio = target_ratio;
    c.seed = seed;
    return c;
  }
};

// [[lo, hi], ...] with null for an open side, or null for a whole dimension.
void parse_rect(const std::string& text, std::size_t n_dims, std::vector<double>& lo, std::vector<double>& hi) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed --rect: ") + e.what());
  }
  if (!j.is_array() || j.size() != n_dims) {
    throw UsageError("--rect must be an array of " + std::to_string(n_dims) + " [lo, hi] pairs");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (const auto& pair : j) {
    if (pair.is_null()) {
      lo.push_back(-inf);
      hi.push_back(inf);
      continue;
    }
    if (!pair.is_array() || pair.size() != 2) throw UsageError("--rect entries must be [lo, hi] pairs or null");
    auto bound = [](const nlohmann::json& v, double open) {
      if (v.is_null()) return open;
      if (!v.is_number()) throw UsageError("--rect bounds must be numbers or null");
      return v.get<double>();
    };
    lo.push_back(bound(pair[0], -inf));
    hi.push_back(bound(pair[1], inf));
    if (!(lo.back() <= hi.back())) throw UsageError("--rect has lo > hi");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlation-aware multidimensional index"};
  app.require_subcommand(1);

  DetectFlags detect_flags;
  std::string detect_csv, detect_dims, detect_out;
  auto* detect = app.add_subcommand("detect", "Detect soft functional dependencies and write a model file");
  detect->add_option("csv", detect_csv, "Input CSV")->required();
  detect->add_option("--dims", detect_dims, "Comma-separated columns (names or indices; default all)");
  detect_flags.add(detect);
  detect->add_option("-o,--output", detect_out, "Model file (default stdout)");

  DetectFlags build_flags;
  std::string build_csv, build_dims, build_models, build_out;
  uint32_t build_cells = 16;
  auto* build = app.add_subcommand("build", "Build an index and write a snapshot");
  build->add_option("csv", build_csv, "Input CSV")->required();
  build->add_option("--dims", build_dims, "Comma-separated columns (names or indices; default all)");
  build->add_option("--models", build_models, "Model file from 'detect' (default: detect now)");
  build->add_option("--cells", build_cells, "Cells per grid dimension")->check(CLI::PositiveNumber);
  build_flags.add(build);
  build->add_option("-o,--output", build_out, "Index snapshot")->required();

  std::string query_index, query_rect;
  bool query_stats = false;
  auto* query = app.add_subcommand("query", "Run a range query against an index snapshot");
  query->add_option("index", query_index, "Index snapshot")->required();
  query->add_option("--rect", query_rect, "JSON array of [lo, hi] pairs; null marks an open side or dimension")->required();
  query->add_flag("--stats", query_stats, "Include scan statistics");

  DetectFlags bench_flags;
  std::string bench_csv, bench_dims, bench_kinds = "point,range", bench_indexes = "coax,columnfiles,uniformgrid,fullscan",
                                      bench_cells = "4,8,16,32,64", bench_out;
  std::size_t bench_k = 100, bench_queries = 1000, bench_threads = 1;
  bool bench_no_timing = false;
  auto* bench = app.add_subcommand("bench", "Benchmark indexes against the full-scan oracle");
  bench->add_option("csv", bench_csv, "Input CSV")->required();
  bench->add_option("--dims", bench_dims, "Comma-separated columns (names or indices; default all)");
  bench->add_option("--workload-k", bench_k, "Neighbours per range query")->check(CLI::PositiveNumber);
  bench->add_option("--queries", bench_queries, "Queries per workload")->check(CLI::PositiveNumber);
  bench->add_option("--kinds", bench_kinds, "Workload kinds: point,range");
  bench->add_option("--indexes", bench_indexes, "Indexes: coax,columnfiles,uniformgrid,fullscan");
  bench->add_option("--cells", bench_cells, "Cells-per-dimension sweep for grid indexes");
  bench->add_option("--threads", bench_threads, "Concurrent replay threads")->check(CLI::PositiveNumber);
  bench->add_flag("--no-timing", bench_no_timing, "Omit timing fields");
  bench_flags.add(bench);
  bench->add_option("-o,--output", bench_out, "Report file (default stdout)");

  std::string theory_eps = "5,10,20", theory_out;
  std::size_t theory_trials = 10000;
  uint64_t theory_n = 1000000, theory_seed = 1;
  double theory_mu = 1.0, theory_sigma = 0.1;
  auto* theory = app.add_subcommand("theory", "Simulate segment capacity and compare with closed forms");
  theory->add_option("--eps-over-sigma", theory_eps, "Comma-separated eps/sigma values");
  theory->add_option("--trials", theory_trials, "Walks per setting")->check(CLI::PositiveNumber);
  theory->add_option("--n", theory_n, "Walk length cap and segment stream length")->check(CLI::PositiveNumber);
  theory->add_option("--mu", theory_mu, "Mean gap")->check(CLI::PositiveNumber);
  theory->add_option("--sigma", theory_sigma, "Gap standard deviation")->check(CLI::PositiveNumber);
  theory->add_option("--seed", theory_seed, "Simulation seed");
  theory->add_option("-o,--output", theory_out, "Report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*detect) {
      DatasetHandle d;
      load_dataset(detect_csv, detect_dims, d);
      const auto cfg = detect_flags.config();
      OwnedString json;
      check(coax_detect(d.p, &cfg, &json.p));
      write_output(detect_out, json.p);
    } else if (*build) {
      DatasetHandle d;
      load_dataset(build_csv, build_dims, d);
      coax_build_config cfg;
      coax_build_config_default(&cfg);
      cfg.detect = build_flags.config();
      cfg.cells_per_dim = build_cells;
      std::string models;
      if (!build_models.empty()) {
        models = read_file(build_models);
        cfg.models_json = models.c_str();
      }
      IndexHandle ix;
      const coax_status st = coax_index_build(d.p, &cfg, &ix.p);
      if (st == COAX_E_INVALID_ARGUMENT || st == COAX_E_PARSE) throw UsageError(coax_last_error());
      check(st);
      check(coax_index_save(ix.p, build_out.c_str()));
      OwnedString stats;
      check(coax_index_stats_json(ix.p, &stats.p));
      std::cout << stats.p;
    } else if (*query) {
      IndexHandle ix;
      check(coax_index_load(query_index.c_str(), &ix.p));
      std::vector<double> lo, hi;
      parse_rect(query_rect, coax_index_dims(ix.p), lo, hi);
      ResultHandle r;
      check(coax_index_query(ix.p, lo.data(), hi.data(), lo.size(), &r.p));
      const uint64_t* rows = coax_result_rows(r.p);
      nlohmann::json out;
      out["count"] = coax_result_count(r.p);
      out["rows"] = std::vector<uint64_t>(rows, rows + coax_result_count(r.p));
      if (query_stats) {
        coax_query_stats s;
        coax_result_stats(r.p, &s);
        out["stats"] = {{"cells_visited", s.cells_visited},
                        {"rows_scanned", s.rows_scanned},
                        {"rows_returned", s.rows_returned}};
      }
      std::cout << out.dump() << "\n";
    } else if (*bench) {
      DatasetHandle d;
      load_dataset(bench_csv, bench_dims, d);
      coax_bench_config cfg;
      coax_bench_config_default(&cfg);
      cfg.workload_k = bench_k;
      cfg.n_queries = bench_queries;
      cfg.threads = bench_threads;
      cfg.seed = bench_flags.seed;
      cfg.include_timing = bench_no_timing ? 0 : 1;
      cfg.dataset_label = bench_csv.c_str();
      cfg.detect = bench_flags.config();
      cfg.query_kinds = 0;
      for (const auto& k : split_list(bench_kinds)) {
        if (k == "point") cfg.query_kinds |= COAX_QUERY_POINT;
        else if (k == "range") cfg.query_kinds |= COAX_QUERY_RANGE;
        else throw UsageError("unknown query kind '" + k + "'");
      }
      cfg.indexes = 0;
      for (const auto& k : split_list(bench_indexes)) {
        if (k == "coax") cfg.indexes |= COAX_INDEX_COAX;
        else if (k == "columnfiles") cfg.indexes |= COAX_INDEX_COLUMN_FILES;
        else if (k == "uniformgrid") cfg.indexes |= COAX_INDEX_UNIFORM_GRID;
        else if (k == "fullscan") cfg.indexes |= COAX_INDEX_FULL_SCAN;
        else throw UsageError("unknown index '" + k + "'");
      }
      std::vector<uint32_t> cells;
      for (const auto& c : split_list(bench_cells)) {
        try {
          const unsigned long v = std::stoul(c);
          if (v < 1) throw std::out_of_range(c);
          cells.push_back(static_cast<uint32_t>(v));
        } catch (const std::logic_error&) {
          throw UsageError("bad --cells value '" + c + "'");
        }
      }
      cfg.cells_per_dim = cells.data();
      cfg.n_cells = cells.size();
      OwnedString report;
      const coax_status st = coax_bench(d.p, &cfg, &report.p);
      if (st == COAX_E_CORRECTNESS) {
        write_output(bench_out, report.p);
        std::cerr << "error: " << coax_last_error() << "\n";
        return kExitCorrectness;
      }
      if (st == COAX_E_INVALID_ARGUMENT) throw UsageError(coax_last_error());
      check(st);
      write_output(bench_out, report.p);
    } else if (*theory) {
      std::vector<double> eps;
      for (const auto& e : split_list(theory_eps)) {
        try {
          eps.push_back(std::stod(e));
        } catch (const std::logic_error&) {
          throw UsageError("bad --eps-over-sigma value '" + e + "'");
        }
        if (!(eps.back() > 0.0)) throw UsageError("--eps-over-sigma values must be positive");
      }
      if (eps.empty()) throw UsageError("--eps-over-sigma is empty");
      coax_theory_config cfg;
      coax_theory_config_default(&cfg);
      cfg.eps_over_sigma = eps.data();
      cfg.n_eps = eps.size();
      cfg.trials = theory_trials;
      cfg.n = theory_n;
      cfg.seed = theory_seed;
      cfg.mu = theory_mu;
      cfg.sigma = theory_sigma;
      OwnedString json;
      check(coax_theory_report(&cfg, &json.p));
      write_output(theory_out, json.p);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}
