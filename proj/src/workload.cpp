#include "coax/workload.hpp"

#include <algorithm>
#include <random>

#include "coax/error.hpp"

namespace coax {

const char* to_string(QueryKind k) { return k == QueryKind::Point ? "point" : "range"; }

QueryKind parse_query_kind(const std::string& s) {
  if (s == "point") return QueryKind::Point;
  if (s == "range") return QueryKind::Range;
  throw Error(ErrorCode::InvalidArgument, "unknown query kind '" + s + "'");
}

Workload gen_workload(const Dataset& d, std::size_t k, std::size_t n_queries, QueryKind kind,
                      std::uint64_t seed, std::optional<std::span<const RowId>> seed_rows) {
  if (k < 1 || k > d.n_rows()) throw Error(ErrorCode::InvalidArgument, "k must lie in [1, n_rows]");
  if (seed_rows && seed_rows->empty()) throw Error(ErrorCode::InvalidArgument, "no candidate seed rows");
  const std::size_t n = d.n_rows(), dims = d.n_dims();

  // Normalized copy, row-major.
  std::vector<double> norm(n * dims);
  for (std::size_t dim = 0; dim < dims; ++dim) {
    auto col = d.column(dim);
    auto [mn, mx] = std::minmax_element(col.begin(), col.end());
    const double span = *mx - *mn;
    for (std::size_t r = 0; r < n; ++r) norm[r * dims + dim] = span > 0.0 ? (col[r] - *mn) / span : 0.0;
  }

  Workload w;
  w.kind = kind;
  w.k = k;
  w.seed = seed;
  w.queries.reserve(n_queries);
  std::mt19937_64 rng(seed);
  const std::size_t pool = seed_rows ? seed_rows->size() : n;
  std::uniform_int_distribution<std::size_t> pick(0, pool - 1);
  std::vector<std::pair<double, RowId>> dist(n);
  for (std::size_t i = 0; i < n_queries; ++i) {
    const std::size_t drawn = pick(rng);
    const RowId s = seed_rows ? (*seed_rows)[drawn] : drawn;
    if (kind == QueryKind::Point) {
      std::vector<double> p(dims);
      for (std::size_t dim = 0; dim < dims; ++dim) p[dim] = d.at(s, dim);
      w.queries.push_back(QueryRect::point(p));
      continue;
    }
    for (std::size_t r = 0; r < n; ++r) {
      double acc = 0.0;
      for (std::size_t dim = 0; dim < dims; ++dim) {
        const double delta = norm[r * dims + dim] - norm[s * dims + dim];
        acc += delta * delta;
      }
      dist[r] = {acc, r};
    }
    // (distance, row id) ordering makes tie-breaking deterministic.
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
    QueryRect q(dims);
    for (std::size_t dim = 0; dim < dims; ++dim) q[dim] = Interval::empty_interval();
    for (std::size_t j = 0; j < k; ++j) {
      const RowId r = dist[j].second;
      for (std::size_t dim = 0; dim < dims; ++dim) {
        const double v = d.at(r, dim);
        q[dim].lo = std::min(q[dim].lo, v);
        q[dim].hi = std::max(q[dim].hi, v);
      }
    }
    w.queries.push_back(std::move(q));
  }
  return w;
}

}  // namespace coax
