#include "coax/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>
#include <variant>

#include <json.hpp>

#include "coax/error.hpp"
#include "coax/grid_index.hpp"

namespace coax {

const char* to_string(IndexKind k) {
  switch (k) {
    case IndexKind::Coax: return "coax";
    case IndexKind::ColumnFiles: return "columnfiles";
    case IndexKind::UniformGrid: return "uniformgrid";
    case IndexKind::FullScan: return "fullscan";
  }
  return "?";
}

IndexKind parse_index_kind(const std::string& s) {
  if (s == "coax") return IndexKind::Coax;
  if (s == "columnfiles") return IndexKind::ColumnFiles;
  if (s == "uniformgrid") return IndexKind::UniformGrid;
  if (s == "fullscan") return IndexKind::FullScan;
  throw Error(ErrorCode::InvalidArgument, "unknown index kind '" + s + "'");
}

bool BenchReport::valid() const {
  return std::all_of(runs.begin(), runs.end(), [](const IndexRun& r) { return r.correct; });
}

namespace {

using Clock = std::chrono::steady_clock;

struct FullScanIndex {
  const Dataset* data;
};

using AnyIndex = std::variant<FullScanIndex, GridIndex, CoaxIndex>;

QueryResult run_query(const AnyIndex& ix, const QueryRect& q) {
  return std::visit(
      [&](const auto& index) -> QueryResult {
        using T = std::decay_t<decltype(index)>;
        if constexpr (std::is_same_v<T, FullScanIndex>) {
          QueryResult r;
          r.rows = full_scan(*index.data, q);
          r.stats.cells_visited = 1;
          r.stats.rows_scanned = index.data->n_rows();
          r.stats.rows_returned = r.rows.size();
          return r;
        } else if constexpr (std::is_same_v<T, GridIndex>) {
          return index.range_query(q);
        } else {
          auto c = index.query(q);
          return QueryResult{std::move(c.rows), c.total()};
        }
      },
      ix);
}

std::size_t directory_bytes(const AnyIndex& ix) {
  if (auto* g = std::get_if<GridIndex>(&ix)) return g->directory_bytes();
  if (auto* c = std::get_if<CoaxIndex>(&ix)) {
    const auto s = c->stats();
    return s.primary_directory_bytes + s.outlier_directory_bytes;
  }
  return 0;
}

AnyIndex build_index(const Dataset& d, const IndexSpec& spec) {
  switch (spec.kind) {
    case IndexKind::FullScan: return FullScanIndex{&d};
    case IndexKind::ColumnFiles: return build_column_files(d, spec.sort_dim.value_or(0), spec.cells_per_dim);
    case IndexKind::UniformGrid: return build_uniform_grid(d, spec.cells_per_dim);
    case IndexKind::Coax: {
      CoaxConfig cfg = spec.coax;
      cfg.cells_per_dim = spec.cells_per_dim;
      if (spec.sort_dim) cfg.sort_dim = spec.sort_dim;
      return CoaxIndex::build(d, cfg, spec.coax_groups);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown index kind");
}

double percentile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

struct Replay {
  std::vector<double> micros;
  std::vector<QueryResult> results;
};

Replay replay(const AnyIndex& ix, const Workload& w, std::size_t threads) {
  Replay out;
  out.micros.resize(w.queries.size());
  out.results.resize(w.queries.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto t0 = Clock::now();
      out.results[i] = run_query(ix, w.queries[i]);
      out.micros[i] = std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, w.queries.size()));
  if (threads == 1) {
    work(0, w.queries.size());
    return out;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (w.queries.size() + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t b = t * chunk, e = std::min(w.queries.size(), b + chunk);
    if (b < e) pool.emplace_back(work, b, e);
  }
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace

BenchReport run_bench(const Dataset& d, const std::vector<Workload>& workloads,
                      const std::vector<IndexSpec>& specs, const BenchOptions& opts) {
  if (std::none_of(specs.begin(), specs.end(), [](const IndexSpec& s) { return s.kind == IndexKind::FullScan; })) {
    throw Error(ErrorCode::InvalidArgument, "the benchmark needs the fullscan oracle");
  }
  BenchReport report;
  report.dataset = opts.dataset_label;
  report.n_rows = d.n_rows();
  report.n_dims = d.n_dims();
  if (!workloads.empty()) {
    report.k = workloads.front().k;
    report.n_queries = workloads.front().queries.size();
    report.seed = workloads.front().seed;
  }

  // Oracle answers, sorted for multiset comparison.
  std::vector<std::vector<std::vector<RowId>>> expected;
  for (const auto& w : workloads) {
    auto& per = expected.emplace_back();
    for (const auto& q : w.queries) {
      auto rows = full_scan(d, q);
      std::sort(rows.begin(), rows.end());
      per.push_back(std::move(rows));
    }
  }

  for (const auto& spec : specs) {
    std::optional<AnyIndex> ix;
    std::string skipped;
    const auto t0 = Clock::now();
    try {
      ix.emplace(build_index(d, spec));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Capacity) throw;
      skipped = e.what();
    }
    const double build_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

    for (std::size_t wi = 0; wi < workloads.size(); ++wi) {
      const auto& w = workloads[wi];
      IndexRun run;
      run.kind = spec.kind;
      run.name = to_string(spec.kind);
      run.cells_per_dim = spec.kind == IndexKind::FullScan ? 0 : spec.cells_per_dim;
      run.workload = w.kind;
      run.skipped = skipped;
      if (!ix) {
        report.runs.push_back(std::move(run));
        continue;
      }
      run.directory_bytes = directory_bytes(*ix);
      run.timing.build_ms = build_ms;

      replay(*ix, w, opts.threads);  // warm-up
      Replay measured = replay(*ix, w, opts.threads);
      for (std::size_t rep = 1; rep < opts.repeats; ++rep) {
        const Replay again = replay(*ix, w, opts.threads);
        for (std::size_t qi = 0; qi < w.queries.size(); ++qi) {
          measured.micros[qi] = std::min(measured.micros[qi], again.micros[qi]);
        }
      }

      std::vector<double> scanned;
      for (std::size_t qi = 0; qi < w.queries.size(); ++qi) {
        auto& res = measured.results[qi];
        run.rows_scanned_total += res.stats.rows_scanned;
        run.rows_returned_total += res.stats.rows_returned;
        run.cells_visited_total += res.stats.cells_visited;
        scanned.push_back(static_cast<double>(res.stats.rows_scanned));
        std::sort(res.rows.begin(), res.rows.end());
        if (res.rows != expected[wi][qi]) {
          run.correct = false;
          if (run.mismatched_queries.size() < 10) run.mismatched_queries.push_back(qi);
        }
      }
      run.median_rows_scanned = median(scanned);
      run.timing.median_query_us = median(measured.micros);
      run.timing.p99_query_us = percentile(measured.micros, 0.99);
      report.runs.push_back(std::move(run));
    }
  }
  return report;
}

std::string report_to_json(const BenchReport& r, bool include_timing) {
  using nlohmann::json;
  json doc;
  doc["environment"] = {{"dataset", r.dataset},
                        {"n_rows", r.n_rows},
                        {"n_dims", r.n_dims},
                        {"workload_k", r.k},
                        {"n_queries", r.n_queries},
                        {"seed", r.seed}};
  doc["valid"] = r.valid();
  doc["indexes"] = json::array();
  for (const auto& run : r.runs) {
    json j;
    j["name"] = run.name;
    j["cells_per_dim"] = run.cells_per_dim;
    j["workload"] = to_string(run.workload);
    if (!run.skipped.empty()) {
      j["skipped"] = run.skipped;
      doc["indexes"].push_back(std::move(j));
      continue;
    }
    j["directory_bytes"] = run.directory_bytes;
    j["rows_scanned_total"] = run.rows_scanned_total;
    j["rows_returned_total"] = run.rows_returned_total;
    j["cells_visited_total"] = run.cells_visited_total;
    j["median_rows_scanned"] = run.median_rows_scanned;
    j["correctness"] = run.correct ? "pass" : "fail";
    if (!run.correct) j["mismatched_queries"] = run.mismatched_queries;
    if (include_timing) {
      j["timing"] = {{"build_ms", run.timing.build_ms},
                     {"median_query_us", run.timing.median_query_us},
                     {"p99_query_us", run.timing.p99_query_us}};
    }
    doc["indexes"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

}  // namespace coax
