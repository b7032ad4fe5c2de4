#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coax/coax_index.hpp"
#include "coax/dataset.hpp"
#include "coax/workload.hpp"

namespace coax {

enum class IndexKind { Coax, ColumnFiles, UniformGrid, FullScan };

const char* to_string(IndexKind k);
IndexKind parse_index_kind(const std::string& s);

struct IndexSpec {
  IndexKind kind = IndexKind::FullScan;
  std::size_t cells_per_dim = 16;
  std::optional<std::size_t> sort_dim;  // column files default to dimension 0
  CoaxConfig coax;                      // used by IndexKind::Coax only
  std::optional<std::vector<CorrelationGroup>> coax_groups;
};

struct Timing {
  double build_ms = 0.0;
  double median_query_us = 0.0;
  double p99_query_us = 0.0;
};

/// Results for one index replaying one workload.
struct IndexRun {
  std::string name;
  IndexKind kind = IndexKind::FullScan;
  std::size_t cells_per_dim = 0;
  QueryKind workload = QueryKind::Range;
  std::string skipped;  // nonempty when the index could not be built
  std::size_t directory_bytes = 0;
  std::size_t rows_scanned_total = 0;
  std::size_t rows_returned_total = 0;
  std::size_t cells_visited_total = 0;
  double median_rows_scanned = 0.0;
  bool correct = true;
  std::vector<std::size_t> mismatched_queries;  // at most 10 samples
  Timing timing;
};

struct BenchReport {
  std::string dataset;
  std::size_t n_rows = 0;
  std::size_t n_dims = 0;
  std::size_t k = 0;
  std::size_t n_queries = 0;
  std::uint64_t seed = 0;
  std::vector<IndexRun> runs;

  /// False if any index disagreed with the full-scan oracle.
  bool valid() const;
};

struct BenchOptions {
  std::string dataset_label = "dataset";
  std::size_t threads = 1;  // >1 replays queries concurrently; timings still per query
  std::size_t repeats = 1;  // measured passes; each query keeps its fastest time
};

/// Builds every spec once, replays each workload (one untimed warm-up pass,
/// then a measured pass) and checks every result against a full scan of the
/// same workload. Requires a FullScan spec.
BenchReport run_bench(const Dataset& d, const std::vector<Workload>& workloads,
                      const std::vector<IndexSpec>& specs, const BenchOptions& opts = {});

/// JSON with per-run "timing" objects kept apart from the deterministic fields.
std::string report_to_json(const BenchReport& r, bool include_timing = true);

}  // namespace coax
