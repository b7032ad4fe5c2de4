#ifndef COAX_COAX_H
#define COAX_COAX_H

/* C interface to the COAX index library. All handles are opaque; every
 * fallible call returns a coax_status and leaves a message for
 * coax_last_error() on the calling thread. Strings returned through char**
 * are owned by the caller and released with coax_string_free(). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(COAX_BUILDING_LIBRARY)
#    define COAX_API __declspec(dllexport)
#  else
#    define COAX_API __declspec(dllimport)
#  endif
#else
#  define COAX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum coax_status {
  COAX_OK = 0,
  COAX_E_INVALID_ARGUMENT = 1,
  COAX_E_IO = 2,
  COAX_E_PARSE = 3,
  COAX_E_DEGENERATE = 4,
  COAX_E_CAPACITY = 5,
  COAX_E_CORRECTNESS = 6,
  COAX_E_INTERNAL = 7
} coax_status;

typedef struct coax_dataset coax_dataset;
typedef struct coax_index coax_index;
typedef struct coax_result coax_result;

COAX_API const char* coax_last_error(void);
COAX_API const char* coax_status_name(coax_status s);
COAX_API void coax_string_free(char* s);

/* Datasets. With n_dims == 0 every header column is loaded. */
COAX_API coax_status coax_dataset_load_csv(const char* path, const char* const* dims, size_t n_dims,
                                           coax_dataset** out);
COAX_API coax_status coax_dataset_from_columns(const double* const* columns, size_t n_dims, size_t n_rows,
                                               coax_dataset** out);
COAX_API size_t coax_dataset_rows(const coax_dataset* d);
COAX_API size_t coax_dataset_dims(const coax_dataset* d);
COAX_API size_t coax_dataset_dropped_rows(const coax_dataset* d);
COAX_API void coax_dataset_free(coax_dataset* d);

/* Soft functional dependency detection. threshold <= 0 selects the default
 * density threshold. */
typedef struct coax_detect_config {
  uint64_t sample_count;
  uint32_t chunks;
  double threshold;
  double target_ratio;
  double min_quality;
  uint64_t seed;
} coax_detect_config;

COAX_API void coax_detect_config_default(coax_detect_config* cfg);
/* Writes the model file (JSON) describing the detected groups. */
COAX_API coax_status coax_detect(const coax_dataset* d, const coax_detect_config* cfg, char** models_json);

/* Index construction. models_json == NULL runs detection with `detect`;
 * sort_dim < 0 picks the default sort dimension. */
typedef struct coax_build_config {
  coax_detect_config detect;
  uint32_t cells_per_dim;
  int64_t sort_dim;
  const char* models_json;
} coax_build_config;

COAX_API void coax_build_config_default(coax_build_config* cfg);
COAX_API coax_status coax_index_build(const coax_dataset* d, const coax_build_config* cfg, coax_index** out);
COAX_API coax_status coax_index_save(const coax_index* ix, const char* path);
COAX_API coax_status coax_index_load(const char* path, coax_index** out);
COAX_API size_t coax_index_dims(const coax_index* ix);
COAX_API coax_status coax_index_stats_json(const coax_index* ix, char** json);
COAX_API void coax_index_free(coax_index* ix);

/* Range query over all n_dims dimensions; use +-INFINITY for open sides. */
typedef struct coax_query_stats {
  uint64_t cells_visited;
  uint64_t rows_scanned;
  uint64_t rows_returned;
} coax_query_stats;

COAX_API coax_status coax_index_query(const coax_index* ix, const double* lo, const double* hi, size_t n_dims,
                                      coax_result** out);
COAX_API size_t coax_result_count(const coax_result* r);
COAX_API const uint64_t* coax_result_rows(const coax_result* r);
COAX_API void coax_result_stats(const coax_result* r, coax_query_stats* stats);
COAX_API void coax_result_free(coax_result* r);

/* Benchmark harness. */
enum {
  COAX_QUERY_POINT = 1,
  COAX_QUERY_RANGE = 2
};
enum {
  COAX_INDEX_COAX = 1,
  COAX_INDEX_COLUMN_FILES = 2,
  COAX_INDEX_UNIFORM_GRID = 4,
  COAX_INDEX_FULL_SCAN = 8
};

typedef struct coax_bench_config {
  size_t workload_k;
  size_t n_queries;
  unsigned query_kinds; /* COAX_QUERY_* mask */
  unsigned indexes;     /* COAX_INDEX_* mask; full scan is always added */
  const uint32_t* cells_per_dim; /* sweep applied to every grid index */
  size_t n_cells;
  uint64_t seed;
  size_t threads;
  int include_timing;
  const char* dataset_label;
  coax_detect_config detect;
} coax_bench_config;

COAX_API void coax_bench_config_default(coax_bench_config* cfg);
/* Returns COAX_E_CORRECTNESS, with the report still written, when any index
 * disagrees with the full scan. */
COAX_API coax_status coax_bench(const coax_dataset* d, const coax_bench_config* cfg, char** report_json);

/* Monte-Carlo check of the segment capacity closed forms. */
typedef struct coax_theory_config {
  const double* eps_over_sigma;
  size_t n_eps;
  size_t trials;
  uint64_t n;
  uint64_t seed;
  double mu;
  double sigma;
} coax_theory_config;

COAX_API void coax_theory_config_default(coax_theory_config* cfg);
COAX_API coax_status coax_theory_report(const coax_theory_config* cfg, char** json);

#ifdef __cplusplus
}
#endif

#endif
