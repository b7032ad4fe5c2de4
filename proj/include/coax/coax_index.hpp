#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coax/dataset.hpp"
#include "coax/geometry.hpp"
#include "coax/grid_index.hpp"
#include "coax/softfd.hpp"

namespace coax {

struct CoaxConfig {
  DetectConfig detect;
  std::size_t cells_per_dim = 16;
  /// Primary sort dimension; defaults to the predictor of the largest group,
  /// or dimension 0 when nothing is correlated.
  std::optional<std::size_t> sort_dim;
  /// Cells per dimension of the outlier grid; by default scaled down from
  /// cells_per_dim so outlier cells hold as many rows as full-data cells would.
  std::optional<std::size_t> outlier_cells_per_dim;
};

struct IndexStats {
  double primary_ratio = 0.0;
  std::size_t n_rows = 0;
  std::size_t primary_rows = 0;
  std::size_t outlier_rows = 0;
  std::size_t indexed_dims = 0;
  std::size_t dependent_dims = 0;
  std::size_t primary_grid_dims = 0;
  std::size_t primary_directory_bytes = 0;
  std::size_t outlier_directory_bytes = 0;
};

struct CoaxQueryResult {
  std::vector<RowId> rows;
  QueryStats primary;
  QueryStats outlier;
  bool primary_skipped = false;
  bool outlier_skipped = false;

  QueryStats total() const {
    QueryStats s = primary;
    s += outlier;
    return s;
  }
};

/// Correlation-aware index: a dimension-reduced grid over the predictor and
/// uncorrelated attributes holding every margin-conforming row, plus a
/// full-dimensional grid over the remaining (outlier) rows. Queries are exact.
class CoaxIndex {
 public:
  /// Learns groups from `d` unless `groups_override` is given, splits the rows
  /// and builds both grids.
  static CoaxIndex build(const Dataset& d, const CoaxConfig& cfg,
                         std::optional<std::vector<CorrelationGroup>> groups_override = std::nullopt);

  CoaxQueryResult query(const QueryRect& q) const;
  CoaxQueryResult point_query(const std::vector<double>& point) const;

  /// Primary-side rectangle after translating dependent constraints onto
  /// their predictors. nullopt when some translated interval is empty.
  std::optional<QueryRect> translate_query(const QueryRect& q) const;

  IndexStats stats() const;

  std::size_t n_dims() const noexcept { return n_dims_; }
  const std::vector<CorrelationGroup>& groups() const noexcept { return groups_; }
  const GridIndex& primary() const noexcept { return primary_; }
  const std::optional<GridIndex>& outliers() const noexcept { return outliers_; }
  /// Per-dimension extent of the outlier rows (empty intervals when none).
  const std::vector<Interval>& outlier_bbox() const noexcept { return outlier_bbox_; }
  std::vector<std::size_t> dependent_dims() const;
  std::vector<std::size_t> indexed_dims() const;

  void save(const std::string& path) const;
  static CoaxIndex load(const std::string& path);
  void write(std::ostream& out) const;
  static CoaxIndex read(std::istream& in);

 private:
  std::size_t n_dims_ = 0;
  std::vector<CorrelationGroup> groups_;
  GridIndex primary_;
  std::optional<GridIndex> outliers_;
  std::vector<Interval> outlier_bbox_;
};

}  // namespace coax
