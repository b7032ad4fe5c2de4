#include "coax/coax.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "coax/bench.hpp"
#include "coax/coax_index.hpp"
#include "coax/error.hpp"
#include "coax/model_io.hpp"
#include "coax/theory.hpp"
#include "coax/workload.hpp"

struct coax_dataset {
  coax::Dataset data;
};

struct coax_index {
  coax::CoaxIndex index;
};

struct coax_result {
  std::vector<std::uint64_t> rows;
  coax_query_stats stats{};
};

namespace {

thread_local std::string g_last_error;

coax_status status_of(coax::ErrorCode c) {
  switch (c) {
    case coax::ErrorCode::InvalidArgument: return COAX_E_INVALID_ARGUMENT;
    case coax::ErrorCode::Io: return COAX_E_IO;
    case coax::ErrorCode::Parse: return COAX_E_PARSE;
    case coax::ErrorCode::Degenerate: return COAX_E_DEGENERATE;
    case coax::ErrorCode::Capacity: return COAX_E_CAPACITY;
    case coax::ErrorCode::Correctness: return COAX_E_CORRECTNESS;
  }
  return COAX_E_INTERNAL;
}

coax_status fail(coax_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <class F>
coax_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const coax::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(COAX_E_CAPACITY, "out of memory");
  } catch (const std::exception& e) {
    return fail(COAX_E_INTERNAL, e.what());
  } catch (...) {
    return fail(COAX_E_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

coax::DetectConfig to_detect(const coax_detect_config& c) {
  coax::DetectConfig cfg;
  cfg.sample_count = static_cast<std::size_t>(c.sample_count);
  cfg.chunks = c.chunks;
  if (c.threshold > 0.0) cfg.threshold = c.threshold;
  cfg.target_ratio = c.target_ratio;
  cfg.min_quality = c.min_quality;
  cfg.seed = c.seed;
  return cfg;
}

}  // namespace

extern "C" {

const char* coax_last_error(void) { return g_last_error.c_str(); }

const char* coax_status_name(coax_status s) {
  switch (s) {
    case COAX_OK: return "ok";
    case COAX_E_INVALID_ARGUMENT: return "invalid argument";
    case COAX_E_IO: return "i/o error";
    case COAX_E_PARSE: return "parse error";
    case COAX_E_DEGENERATE: return "degenerate input";
    case COAX_E_CAPACITY: return "capacity exceeded";
    case COAX_E_CORRECTNESS: return "correctness failure";
    case COAX_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void coax_string_free(char* s) { std::free(s); }

coax_status coax_dataset_load_csv(const char* path, const char* const* dims, size_t n_dims, coax_dataset** out) {
  if (!path || !out || (n_dims > 0 && !dims)) return fail(COAX_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<std::string> sel;
    if (n_dims == 0) {
      sel = coax::csv_header(path);
    } else {
      for (size_t i = 0; i < n_dims; ++i) {
        if (!dims[i]) return fail(COAX_E_INVALID_ARGUMENT, "null column selector");
        sel.emplace_back(dims[i]);
      }
    }
    *out = new coax_dataset{coax::load_csv(path, sel)};
    return COAX_OK;
  });
}

coax_status coax_dataset_from_columns(const double* const* columns, size_t n_dims, size_t n_rows,
                                      coax_dataset** out) {
  if (!out || (n_dims > 0 && !columns)) return fail(COAX_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<std::vector<double>> cols;
    for (size_t j = 0; j < n_dims; ++j) {
      if (!columns[j] && n_rows > 0) return fail(COAX_E_INVALID_ARGUMENT, "null column");
      cols.emplace_back(columns[j], columns[j] + n_rows);
    }
    *out = new coax_dataset{coax::Dataset(std::move(cols))};
    return COAX_OK;
  });
}

size_t coax_dataset_rows(const coax_dataset* d) { return d ? d->data.n_rows() : 0; }
size_t coax_dataset_dims(const coax_dataset* d) { return d ? d->data.n_dims() : 0; }
size_t coax_dataset_dropped_rows(const coax_dataset* d) { return d ? d->data.dropped_rows() : 0; }
void coax_dataset_free(coax_dataset* d) { delete d; }

void coax_detect_config_default(coax_detect_config* cfg) {
  if (!cfg) return;
  const coax::DetectConfig def;
  cfg->sample_count = def.sample_count;
  cfg->chunks = static_cast<uint32_t>(def.chunks);
  cfg->threshold = 0.0;
  cfg->target_ratio = def.target_ratio;
  cfg->min_quality = def.min_quality;
  cfg->seed = def.seed;
}

coax_status coax_detect(const coax_dataset* d, const coax_detect_config* cfg, char** models_json) {
  if (!d || !cfg || !models_json) return fail(COAX_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto groups = coax::learn_groups(d->data, to_detect(*cfg));
    *models_json = dup_string(coax::groups_to_json(groups, d->data.n_dims(), d->data.names()));
    return COAX_OK;
  });
}

void coax_build_config_default(coax_build_config* cfg) {
  if (!cfg) return;
  coax_detect_config_default(&cfg->detect);
  cfg->cells_per_dim = 16;
  cfg->sort_dim = -1;
  cfg->models_json = nullptr;
}

coax_status coax_index_build(const coax_dataset* d, const coax_build_config* cfg, coax_index** out) {
  if (!d || !cfg || !out) return fail(COAX_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    coax::CoaxConfig cc;
    cc.detect = to_detect(cfg->detect);
    cc.cells_per_dim = cfg->cells_per_dim;
    if (cfg->sort_dim >= 0) cc.sort_dim = static_cast<std::size_t>(cfg->sort_dim);
    std::optional<std::vector<coax::CorrelationGroup>> groups;
    if (cfg->models_json) groups = coax::groups_from_json(cfg->models_json, d->data.n_dims());
    *out = new coax_index{coax::CoaxIndex::build(d->data, cc, std::move(groups))};
    return COAX_OK;
  });
}

coax_status coax_index_save(const coax_index* ix, const char* path) {
  if (!ix || !path) return fail(COAX_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    ix->index.save(path);
    return COAX_OK;
  });
}

coax_status coax_index_load(const char* path, coax_index** out) {
  if (!path || !out) return fail(COAX_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new coax_index{coax::CoaxIndex::load(path)};
    return COAX_OK;
  });
}

size_t coax_index_dims(const coax_index* ix) { return ix ? ix->index.n_dims() : 0; }

coax_status coax_index_stats_json(const coax_index* ix, char** json) {
  if (!ix || !json) return fail(COAX_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *json = dup_string(coax::stats_to_json(ix->index.stats()));
    return COAX_OK;
  });
}

void coax_index_free(coax_index* ix) { delete ix; }

coax_status coax_index_query(const coax_index* ix, const double* lo, const double* hi, size_t n_dims,
                             coax_result** out) {
  if (!ix || !lo || !hi || !out) return fail(COAX_E_INVALID_ARGUMENT, "null argument");
  if (n_dims != ix->index.n_dims()) return fail(COAX_E_INVALID_ARGUMENT, "query dimensionality does not match the index");
  return guarded([&] {
    coax::QueryRect q(n_dims);
    for (size_t j = 0; j < n_dims; ++j) {
      if (!(lo[j] <= hi[j])) return fail(COAX_E_INVALID_ARGUMENT, "query has lo > hi or NaN bounds");
      q[j] = {lo[j], hi[j]};
    }
    auto res = ix->index.query(q);
    const auto total = res.total();
    auto* r = new coax_result;
    r->rows.assign(res.rows.begin(), res.rows.end());
    r->stats = {total.cells_visited, total.rows_scanned, total.rows_returned};
    *out = r;
    return COAX_OK;
  });
}

size_t coax_result_count(const coax_result* r) { return r ? r->rows.size() : 0; }
const uint64_t* coax_result_rows(const coax_result* r) { return r ? r->rows.data() : nullptr; }
void coax_result_stats(const coax_result* r, coax_query_stats* stats) {
  if (r && stats) *stats = r->stats;
}
void coax_result_free(coax_result* r) { delete r; }

void coax_bench_config_default(coax_bench_config* cfg) {
  if (!cfg) return;
  static const uint32_t kSweep[] = {4, 8, 16, 32, 64};
  cfg->workload_k = 100;
  cfg->n_queries = 1000;
  cfg->query_kinds = COAX_QUERY_POINT | COAX_QUERY_RANGE;
  cfg->indexes = COAX_INDEX_COAX | COAX_INDEX_COLUMN_FILES | COAX_INDEX_UNIFORM_GRID | COAX_INDEX_FULL_SCAN;
  cfg->cells_per_dim = kSweep;
  cfg->n_cells = 5;
  cfg->seed = 1;
  cfg->threads = 1;
  cfg->include_timing = 1;
  cfg->dataset_label = "dataset";
  coax_detect_config_default(&cfg->detect);
}

coax_status coax_bench(const coax_dataset* d, const coax_bench_config* cfg, char** report_json) {
  if (!d || !cfg || !report_json) return fail(COAX_E_INVALID_ARGUMENT, "null argument");
  if (cfg->n_cells > 0 && !cfg->cells_per_dim) return fail(COAX_E_INVALID_ARGUMENT, "null cell sweep");
  if ((cfg->query_kinds & (COAX_QUERY_POINT | COAX_QUERY_RANGE)) == 0) {
    return fail(COAX_E_INVALID_ARGUMENT, "no query kind selected");
  }
  return guarded([&] {
    const auto& data = d->data;
    std::vector<coax::Workload> workloads;
    if (cfg->query_kinds & COAX_QUERY_POINT) {
      workloads.push_back(coax::gen_workload(data, cfg->workload_k, cfg->n_queries, coax::QueryKind::Point, cfg->seed));
    }
    if (cfg->query_kinds & COAX_QUERY_RANGE) {
      workloads.push_back(coax::gen_workload(data, cfg->workload_k, cfg->n_queries, coax::QueryKind::Range, cfg->seed));
    }

    std::vector<std::size_t> sweep(cfg->cells_per_dim, cfg->cells_per_dim + cfg->n_cells);
    if (sweep.empty()) sweep.push_back(16);

    std::vector<coax::IndexSpec> specs;
    coax::IndexSpec full;
    full.kind = coax::IndexKind::FullScan;
    specs.push_back(full);
    const coax::DetectConfig det = to_detect(cfg->detect);
    std::optional<std::vector<coax::CorrelationGroup>> groups;
    if (cfg->indexes & COAX_INDEX_COAX) groups = coax::learn_groups(data, det);
    for (const auto kind : {coax::IndexKind::Coax, coax::IndexKind::ColumnFiles, coax::IndexKind::UniformGrid}) {
      const unsigned bit = kind == coax::IndexKind::Coax          ? COAX_INDEX_COAX
                           : kind == coax::IndexKind::ColumnFiles ? COAX_INDEX_COLUMN_FILES
                                                                  : COAX_INDEX_UNIFORM_GRID;
      if (!(cfg->indexes & bit)) continue;
      for (std::size_t c : sweep) {
        coax::IndexSpec s;
        s.kind = kind;
        s.cells_per_dim = c;
        s.coax.detect = det;
        if (kind == coax::IndexKind::Coax) s.coax_groups = groups;
        specs.push_back(std::move(s));
      }
    }

    coax::BenchOptions opts;
    opts.dataset_label = cfg->dataset_label ? cfg->dataset_label : "dataset";
    opts.threads = cfg->threads;
    const auto report = coax::run_bench(data, workloads, specs, opts);
    *report_json = dup_string(coax::report_to_json(report, cfg->include_timing != 0));
    if (!report.valid()) return fail(COAX_E_CORRECTNESS, "an index disagreed with the full scan");
    return COAX_OK;
  });
}

void coax_theory_config_default(coax_theory_config* cfg) {
  if (!cfg) return;
  static const double kEps[] = {5, 10, 20};
  const coax::theory::ReportConfig def;
  cfg->eps_over_sigma = kEps;
  cfg->n_eps = 3;
  cfg->trials = def.trials;
  cfg->n = def.n;
  cfg->seed = def.seed;
  cfg->mu = def.mu;
  cfg->sigma = def.sigma;
}

coax_status coax_theory_report(const coax_theory_config* cfg, char** json) {
  if (!cfg || !json || (cfg->n_eps > 0 && !cfg->eps_over_sigma)) return fail(COAX_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    coax::theory::ReportConfig rc;
    if (cfg->n_eps > 0) rc.eps_over_sigma.assign(cfg->eps_over_sigma, cfg->eps_over_sigma + cfg->n_eps);
    rc.trials = cfg->trials;
    rc.n = static_cast<std::size_t>(cfg->n);
    rc.seed = cfg->seed;
    rc.mu = cfg->mu;
    rc.sigma = cfg->sigma;
    *json = dup_string(coax::theory::report_json(rc));
    return COAX_OK;
  });
}

}  // extern "C"
