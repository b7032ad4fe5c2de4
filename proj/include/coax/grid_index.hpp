#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "coax/dataset.hpp"
#include "coax/geometry.hpp"

namespace coax {

enum class GridMode : std::uint8_t { Quantile = 0, Uniform = 1 };

/// Contiguous run of rows belonging to one grid cell.
struct CellDescriptor {
  std::uint64_t begin = 0;
  std::uint64_t count = 0;
};

// Accounting constants for directory_bytes().
inline constexpr std::size_t kCellDescriptorBytes = sizeof(CellDescriptor);
inline constexpr std::size_t kBoundaryBytes = sizeof(double);
static_assert(kCellDescriptorBytes == 16);

struct QueryStats {
  std::size_t cells_visited = 0;
  std::size_t rows_scanned = 0;
  std::size_t rows_returned = 0;

  QueryStats& operator+=(const QueryStats& o) {
    cells_visited += o.cells_visited;
    rows_scanned += o.rows_scanned;
    rows_returned += o.rows_returned;
    return *this;
  }
};

struct QueryResult {
  std::vector<RowId> rows;
  QueryStats stats;
};

struct GridConfig {
  std::vector<std::size_t> grid_dims;
  std::optional<std::size_t> sort_dim;  // none: plain scan of each visited cell
  std::size_t cells_per_dim = 16;
  GridMode mode = GridMode::Quantile;
  std::size_t max_cells = std::size_t{1} << 22;  // build refuses larger directories
};

/// Grid file over `grid_dims` with per-dimension cell boundaries, a dense
/// row-major cell directory, and a row store grouped by cell. Rows inside a
/// cell are ordered by `sort_dim`, which range queries binary-search.
///
/// Cell k along a dimension covers [boundary[k-1], boundary[k]), with the
/// outermost cells open towards -inf / +inf. The index is immutable after
/// build and safe for concurrent readers.
class GridIndex {
 public:
  GridIndex() = default;

  static GridIndex build(const Dataset& d, std::span<const RowId> rows, const GridConfig& cfg);
  static GridIndex build(const Dataset& d, const GridConfig& cfg);

  QueryResult range_query(const QueryRect& q) const;
  QueryResult point_query(const std::vector<double>& point) const;

  /// Cell descriptors plus boundary arrays; the row store is excluded.
  std::size_t directory_bytes() const;

  std::size_t n_dims() const noexcept { return n_dims_; }
  std::size_t n_rows() const noexcept { return row_ids_.size(); }
  std::size_t n_cells() const noexcept { return cells_.size(); }
  GridMode mode() const noexcept { return mode_; }
  const std::vector<std::size_t>& grid_dims() const noexcept { return grid_dims_; }
  std::optional<std::size_t> sort_dim() const noexcept { return sort_dim_; }
  const std::vector<std::vector<double>>& boundaries() const noexcept { return boundaries_; }
  const std::vector<CellDescriptor>& cells() const noexcept { return cells_; }
  std::span<const RowId> row_ids() const noexcept { return row_ids_; }
  std::span<const double> row(std::size_t pos) const {
    return {values_.data() + pos * n_dims_, n_dims_};
  }
  /// Per-dimension extent of the stored rows; empty intervals when no rows.
  const std::vector<Interval>& bounds() const noexcept { return bounds_; }

  /// Cell index along grid dimension `k` (position in grid_dims) for value v.
  std::size_t cell_coordinate(std::size_t k, double v) const;
  std::size_t cell_address(std::span<const double> row) const;

  void write(std::ostream& out) const;
  static GridIndex read(std::istream& in);

 private:
  // Dimensions a scanned row still has to be tested on, with their bounds.
  struct RowFilter {
    std::vector<std::size_t> dims;
    std::vector<double> lo;
    std::vector<double> hi;
  };

  template <class Visit>
  void scan_cell(const CellDescriptor& cell, const QueryRect& q, const RowFilter& filter, QueryStats& stats,
                 Visit&& visit) const;

  std::size_t n_dims_ = 0;
  GridMode mode_ = GridMode::Quantile;
  std::vector<std::size_t> grid_dims_;
  std::optional<std::size_t> sort_dim_;
  std::vector<std::vector<double>> boundaries_;
  std::vector<std::size_t> strides_;
  std::vector<CellDescriptor> cells_;
  std::vector<RowId> row_ids_;
  std::vector<double> values_;  // row-major, n_dims_ per row, grouped by cell
  std::vector<Interval> bounds_;
};

/// Directory size of a hypothetical grid with the given per-dimension cell
/// counts, under the same accounting as GridIndex::directory_bytes().
std::size_t planned_directory_bytes(std::span<const std::size_t> cells_per_grid_dim);

/// Exact filter over every row of the dataset; the correctness oracle.
std::vector<RowId> full_scan(const Dataset& d, const QueryRect& q);
std::vector<RowId> full_scan(const Dataset& d, std::span<const RowId> rows, const QueryRect& q);

// Baselines built on GridIndex.

/// Quantile grid over every dimension except `sort_dim`, rows sorted by it.
GridIndex build_column_files(const Dataset& d, std::size_t sort_dim, std::size_t cells_per_dim);

/// Equal-width grid over every dimension with no in-cell ordering.
GridIndex build_uniform_grid(const Dataset& d, std::size_t cells_per_dim);

}  // namespace coax
