#include "coax/grid_index.hpp"

#include <algorithm>
#include <numeric>

#include "binary_io.hpp"
#include "coax/error.hpp"

namespace coax {

namespace {

std::vector<double> cell_boundaries(std::vector<double> values, std::size_t cells, GridMode mode) {
  std::sort(values.begin(), values.end());
  const double lo = values.front();
  const double hi = values.back();
  std::vector<double> b;
  for (std::size_t i = 1; i < cells; ++i) {
    const double level = static_cast<double>(i) / static_cast<double>(cells);
    b.push_back(mode == GridMode::Quantile ? quantile_sorted(values, level) : lo + level * (hi - lo));
  }
  // A boundary at or below the minimum would only open an always-empty cell.
  b.erase(std::remove_if(b.begin(), b.end(), [lo](double v) { return v <= lo; }), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

void validate(const Dataset& d, const GridConfig& cfg) {
  if (cfg.cells_per_dim < 1) throw Error(ErrorCode::InvalidArgument, "cells_per_dim must be at least 1");
  std::vector<bool> seen(d.n_dims(), false);
  for (std::size_t g : cfg.grid_dims) {
    if (g >= d.n_dims()) throw Error(ErrorCode::InvalidArgument, "grid dimension out of range");
    if (seen[g]) throw Error(ErrorCode::InvalidArgument, "grid dimension listed twice");
    seen[g] = true;
  }
  if (cfg.sort_dim) {
    if (*cfg.sort_dim >= d.n_dims()) throw Error(ErrorCode::InvalidArgument, "sort dimension out of range");
    if (seen[*cfg.sort_dim]) throw Error(ErrorCode::InvalidArgument, "sort dimension is also a grid dimension");
  }
}

}  // namespace

GridIndex GridIndex::build(const Dataset& d, const GridConfig& cfg) {
  std::vector<RowId> rows(d.n_rows());
  std::iota(rows.begin(), rows.end(), RowId{0});
  return build(d, rows, cfg);
}

GridIndex GridIndex::build(const Dataset& d, std::span<const RowId> rows, const GridConfig& cfg) {
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "cannot build a grid over zero rows");
  validate(d, cfg);

  GridIndex g;
  g.n_dims_ = d.n_dims();
  g.mode_ = cfg.mode;
  g.grid_dims_ = cfg.grid_dims;
  g.sort_dim_ = cfg.sort_dim;

  std::size_t n_cells = 1;
  for (std::size_t dim : g.grid_dims_) {
    std::vector<double> values;
    values.reserve(rows.size());
    for (RowId r : rows) values.push_back(d.at(r, dim));
    g.boundaries_.push_back(cell_boundaries(std::move(values), cfg.cells_per_dim, cfg.mode));
    const std::size_t along = g.boundaries_.back().size() + 1;
    if (n_cells > cfg.max_cells / along) {
      throw Error(ErrorCode::Capacity, "grid directory exceeds the configured cell limit");
    }
    n_cells *= along;
  }
  g.strides_.assign(g.grid_dims_.size(), 1);
  for (std::size_t k = g.grid_dims_.size(); k-- > 1;) {
    g.strides_[k - 1] = g.strides_[k] * (g.boundaries_[k].size() + 1);
  }

  // Counting sort of rows by cell address, then order each cell by sort_dim.
  std::vector<std::size_t> address(rows.size());
  std::vector<double> row(d.n_dims());
  g.cells_.assign(n_cells, CellDescriptor{});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t dim = 0; dim < d.n_dims(); ++dim) row[dim] = d.at(rows[i], dim);
    address[i] = g.cell_address(row);
    ++g.cells_[address[i]].count;
  }
  std::uint64_t offset = 0;
  for (auto& c : g.cells_) {
    c.begin = offset;
    offset += c.count;
  }
  std::vector<std::size_t> order(rows.size());
  {
    std::vector<std::uint64_t> fill(n_cells);
    for (std::size_t c = 0; c < n_cells; ++c) fill[c] = g.cells_[c].begin;
    for (std::size_t i = 0; i < rows.size(); ++i) order[fill[address[i]]++] = i;
  }
  if (g.sort_dim_) {
    const std::size_t s = *g.sort_dim_;
    for (const auto& c : g.cells_) {
      auto first = order.begin() + static_cast<std::ptrdiff_t>(c.begin);
      std::sort(first, first + static_cast<std::ptrdiff_t>(c.count), [&](std::size_t a, std::size_t b) {
        const double va = d.at(rows[a], s), vb = d.at(rows[b], s);
        return va < vb || (va == vb && rows[a] < rows[b]);
      });
    }
  }

  g.row_ids_.reserve(rows.size());
  g.values_.reserve(rows.size() * d.n_dims());
  g.bounds_.assign(d.n_dims(), Interval::empty_interval());
  for (std::size_t i : order) {
    const RowId r = rows[i];
    g.row_ids_.push_back(r);
    for (std::size_t dim = 0; dim < d.n_dims(); ++dim) {
      const double v = d.at(r, dim);
      g.values_.push_back(v);
      auto& b = g.bounds_[dim];
      b.lo = std::min(b.lo, v);
      b.hi = std::max(b.hi, v);
    }
  }
  return g;
}

std::size_t GridIndex::cell_coordinate(std::size_t k, double v) const {
  const auto& b = boundaries_[k];
  return static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), v) - b.begin());
}

std::size_t GridIndex::cell_address(std::span<const double> row) const {
  std::size_t addr = 0;
  for (std::size_t k = 0; k < grid_dims_.size(); ++k) {
    addr += cell_coordinate(k, row[grid_dims_[k]]) * strides_[k];
  }
  return addr;
}

template <class Visit>
void GridIndex::scan_cell(const CellDescriptor& cell, const QueryRect& q, const RowFilter& filter,
                          QueryStats& stats, Visit&& visit) const {
  std::size_t first = cell.begin;
  std::size_t last = cell.begin + cell.count;
  if (sort_dim_ && cell.count > 0) {
    const std::size_t s = *sort_dim_;
    const Interval& range = q[s];
    auto value = [&](std::size_t pos) { return values_[pos * n_dims_ + s]; };
    // Two bounding binary searches over the cell's sorted run.
    std::size_t lo = first, hi = last;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (value(mid) < range.lo) lo = mid + 1; else hi = mid;
    }
    const std::size_t begin = lo;
    hi = last;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (value(mid) <= range.hi) lo = mid + 1; else hi = mid;
    }
    first = begin;
    last = lo;
  }
  stats.rows_scanned += last - first;
  const std::size_t n_check = filter.dims.size();
  for (std::size_t pos = first; pos < last; ++pos) {
    const double* r = values_.data() + pos * n_dims_;
    bool inside = true;
    for (std::size_t i = 0; i < n_check && inside; ++i) {
      const double v = r[filter.dims[i]];
      inside = filter.lo[i] <= v && v <= filter.hi[i];
    }
    if (inside) {
      ++stats.rows_returned;
      visit(pos);
    }
  }
}

QueryResult GridIndex::range_query(const QueryRect& q) const {
  if (q.n_dims() != n_dims_) throw Error(ErrorCode::InvalidArgument, "query dimensionality does not match index");
  QueryResult result;
  if (row_ids_.empty() || q.empty()) return result;
  for (std::size_t dim = 0; dim < n_dims_; ++dim) {
    if (!q[dim].intersects(bounds_[dim])) return result;
  }

  const std::size_t k_dims = grid_dims_.size();
  std::vector<std::size_t> lo(k_dims), hi(k_dims), cur(k_dims);
  for (std::size_t k = 0; k < k_dims; ++k) {
    const std::size_t dim = grid_dims_[k];
    lo[k] = cell_coordinate(k, std::max(q[dim].lo, bounds_[dim].lo));
    hi[k] = cell_coordinate(k, std::min(q[dim].hi, bounds_[dim].hi));
    cur[k] = lo[k];
  }
  // The binary searches already enforce the sort dimension, and a dimension
  // whose interval covers the stored extent cannot reject anything.
  RowFilter filter;
  for (std::size_t dim = 0; dim < n_dims_; ++dim) {
    if (sort_dim_ && dim == *sort_dim_) continue;
    if (q[dim].lo <= bounds_[dim].lo && q[dim].hi >= bounds_[dim].hi) continue;
    filter.dims.push_back(dim);
    filter.lo.push_back(q[dim].lo);
    filter.hi.push_back(q[dim].hi);
  }
  auto emit = [&](std::size_t pos) { result.rows.push_back(row_ids_[pos]); };
  // Odometer over the cell ranges; the last grid dimension varies fastest.
  while (true) {
    std::size_t addr = 0;
    for (std::size_t k = 0; k < k_dims; ++k) addr += cur[k] * strides_[k];
    ++result.stats.cells_visited;
    scan_cell(cells_[addr], q, filter, result.stats, emit);
    std::size_t k = k_dims;
    while (k > 0) {
      --k;
      if (cur[k] < hi[k]) {
        ++cur[k];
        break;
      }
      cur[k] = lo[k];
      if (k == 0) return result;
    }
    if (k_dims == 0) return result;
  }
}

QueryResult GridIndex::point_query(const std::vector<double>& point) const {
  return range_query(QueryRect::point(point));
}

std::size_t GridIndex::directory_bytes() const {
  std::size_t b = cells_.size() * kCellDescriptorBytes;
  for (const auto& bd : boundaries_) b += bd.size() * kBoundaryBytes;
  return b;
}

std::size_t planned_directory_bytes(std::span<const std::size_t> cells_per_grid_dim) {
  std::size_t cells = 1;
  std::size_t boundaries = 0;
  for (std::size_t c : cells_per_grid_dim) {
    cells *= c;
    boundaries += c - 1;
  }
  return cells * kCellDescriptorBytes + boundaries * kBoundaryBytes;
}

std::vector<RowId> full_scan(const Dataset& d, const QueryRect& q) {
  std::vector<RowId> out;
  if (q.n_dims() != d.n_dims()) throw Error(ErrorCode::InvalidArgument, "query dimensionality does not match dataset");
  std::vector<std::span<const double>> cols;
  for (std::size_t dim = 0; dim < d.n_dims(); ++dim) cols.push_back(d.column(dim));
  for (RowId r = 0; r < d.n_rows(); ++r) {
    bool hit = true;
    for (std::size_t dim = 0; dim < cols.size() && hit; ++dim) hit = q[dim].contains(cols[dim][r]);
    if (hit) out.push_back(r);
  }
  return out;
}

std::vector<RowId> full_scan(const Dataset& d, std::span<const RowId> rows, const QueryRect& q) {
  std::vector<RowId> out;
  if (q.n_dims() != d.n_dims()) throw Error(ErrorCode::InvalidArgument, "query dimensionality does not match dataset");
  for (RowId r : rows) {
    bool hit = true;
    for (std::size_t dim = 0; dim < d.n_dims() && hit; ++dim) hit = q[dim].contains(d.at(r, dim));
    if (hit) out.push_back(r);
  }
  return out;
}

GridIndex build_column_files(const Dataset& d, std::size_t sort_dim, std::size_t cells_per_dim) {
  GridConfig cfg;
  for (std::size_t dim = 0; dim < d.n_dims(); ++dim) {
    if (dim != sort_dim) cfg.grid_dims.push_back(dim);
  }
  cfg.sort_dim = sort_dim;
  cfg.cells_per_dim = cells_per_dim;
  cfg.mode = GridMode::Quantile;
  return GridIndex::build(d, cfg);
}

GridIndex build_uniform_grid(const Dataset& d, std::size_t cells_per_dim) {
  GridConfig cfg;
  cfg.grid_dims.resize(d.n_dims());
  std::iota(cfg.grid_dims.begin(), cfg.grid_dims.end(), std::size_t{0});
  cfg.cells_per_dim = cells_per_dim;
  cfg.mode = GridMode::Uniform;
  return GridIndex::build(d, cfg);
}

// Snapshot layout (all little-endian):
//   u8 mode, u8 has_sort, u32 sort_dim, u32 n_dims, u32 n_grid_dims,
//   u32 grid_dims[n_grid_dims],
//   per grid dim: u64 n_boundaries, f64 boundaries[],
//   u64 n_cells, {u64 begin, u64 count}[n_cells],
//   u64 n_rows, u64 row_ids[n_rows], f64 values[n_rows * n_dims]
void GridIndex::write(std::ostream& out) const {
  using namespace detail;
  put_u8(out, static_cast<std::uint8_t>(mode_));
  put_u8(out, sort_dim_ ? 1 : 0);
  put_u32(out, static_cast<std::uint32_t>(sort_dim_.value_or(0)));
  put_u32(out, static_cast<std::uint32_t>(n_dims_));
  put_u32(out, static_cast<std::uint32_t>(grid_dims_.size()));
  for (std::size_t g : grid_dims_) put_u32(out, static_cast<std::uint32_t>(g));
  for (const auto& b : boundaries_) {
    put_u64(out, b.size());
    for (double v : b) put_f64(out, v);
  }
  put_u64(out, cells_.size());
  for (const auto& c : cells_) {
    put_u64(out, c.begin);
    put_u64(out, c.count);
  }
  put_u64(out, row_ids_.size());
  for (RowId r : row_ids_) put_u64(out, r);
  for (double v : values_) put_f64(out, v);
}

GridIndex GridIndex::read(std::istream& in) {
  using namespace detail;
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 40;
  GridIndex g;
  const std::uint8_t mode = get_u8(in);
  if (mode > 1) throw Error(ErrorCode::Parse, "unknown grid mode in snapshot");
  g.mode_ = static_cast<GridMode>(mode);
  const bool has_sort = get_u8(in) != 0;
  const std::uint32_t sort_dim = get_u32(in);
  g.n_dims_ = get_u32(in);
  const std::uint32_t n_grid = get_u32(in);
  if (n_grid > g.n_dims_ || (has_sort && sort_dim >= g.n_dims_)) {
    throw Error(ErrorCode::Parse, "inconsistent grid header in snapshot");
  }
  if (has_sort) g.sort_dim_ = sort_dim;
  for (std::uint32_t k = 0; k < n_grid; ++k) {
    const std::uint32_t dim = get_u32(in);
    if (dim >= g.n_dims_) throw Error(ErrorCode::Parse, "grid dimension out of range in snapshot");
    g.grid_dims_.push_back(dim);
  }
  std::size_t expected_cells = 1;
  for (std::uint32_t k = 0; k < n_grid; ++k) {
    std::vector<double> b(get_count(in, kLimit));
    for (double& v : b) v = get_f64(in);
    expected_cells *= b.size() + 1;
    g.boundaries_.push_back(std::move(b));
  }
  g.strides_.assign(n_grid, 1);
  for (std::size_t k = n_grid; k-- > 1;) g.strides_[k - 1] = g.strides_[k] * (g.boundaries_[k].size() + 1);

  g.cells_.resize(get_count(in, kLimit));
  if (g.cells_.size() != expected_cells) throw Error(ErrorCode::Parse, "cell count mismatch in snapshot");
  for (auto& c : g.cells_) {
    c.begin = get_u64(in);
    c.count = get_u64(in);
  }
  g.row_ids_.resize(get_count(in, kLimit));
  for (RowId& r : g.row_ids_) r = get_u64(in);
  g.values_.resize(g.row_ids_.size() * g.n_dims_);
  for (double& v : g.values_) v = get_f64(in);
  for (const auto& c : g.cells_) {
    if (c.begin + c.count > g.row_ids_.size()) throw Error(ErrorCode::Parse, "cell extends past row store");
  }
  g.bounds_.assign(g.n_dims_, Interval::empty_interval());
  for (std::size_t pos = 0; pos < g.row_ids_.size(); ++pos) {
    for (std::size_t dim = 0; dim < g.n_dims_; ++dim) {
      const double v = g.values_[pos * g.n_dims_ + dim];
      g.bounds_[dim].lo = std::min(g.bounds_[dim].lo, v);
      g.bounds_[dim].hi = std::max(g.bounds_[dim].hi, v);
    }
  }
  return g;
}

}  // namespace coax
