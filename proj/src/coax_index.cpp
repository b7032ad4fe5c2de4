#include "coax/coax_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "binary_io.hpp"
#include "coax/error.hpp"
#include "coax/translate.hpp"

namespace coax {

namespace {

constexpr char kMagic[8] = {'C', 'O', 'A', 'X', 'I', 'D', 'X', '\0'};
constexpr std::uint32_t kSnapshotVersion = 1;

void validate_groups(const std::vector<CorrelationGroup>& groups, std::size_t n_dims) {
  std::vector<bool> used(n_dims, false);
  auto claim = [&](std::size_t dim) {
    if (dim >= n_dims) throw Error(ErrorCode::InvalidArgument, "group references a dimension outside the dataset");
    if (used[dim]) throw Error(ErrorCode::InvalidArgument, "dimension appears in more than one group");
    used[dim] = true;
  };
  for (const auto& g : groups) {
    claim(g.predictor);
    for (const auto& m : g.models) {
      if (m.indexed_dim != g.predictor) {
        throw Error(ErrorCode::InvalidArgument, "group model is not indexed on the group predictor");
      }
      if (m.m == 0.0 || !std::isfinite(m.m) || !std::isfinite(m.b) || !(m.eps_lb >= 0.0) ||
          !(m.eps_ub >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "group model has a zero slope or invalid margins");
      }
      claim(m.dependent_dim);
    }
  }
}

// Keeps the outlier grid at the rows-per-cell density a column-files grid with
// `cells` per dimension would have over all rows, cells * (outliers/n)^(1/g),
// but never with more cells than outlier rows or than the directory limit.
std::size_t default_outlier_cells(std::size_t outlier_rows, std::size_t n_rows, std::size_t grid_dims,
                                  std::size_t cells, std::size_t max_cells) {
  if (grid_dims == 0 || outlier_rows == 0) return 1;
  const double g = static_cast<double>(grid_dims);
  const double share = static_cast<double>(outlier_rows) / static_cast<double>(n_rows);
  double per_dim = static_cast<double>(cells) * std::pow(share, 1.0 / g);
  per_dim = std::min(per_dim, std::pow(static_cast<double>(outlier_rows), 1.0 / g));
  per_dim = std::min(per_dim, std::pow(static_cast<double>(max_cells), 1.0 / g));
  // Guard against pow rounding just past an integer root.
  auto k = static_cast<std::size_t>(std::floor(per_dim + 1e-9));
  return std::clamp(k, std::size_t{1}, cells);
}

}  // namespace

CoaxIndex CoaxIndex::build(const Dataset& d, const CoaxConfig& cfg,
                           std::optional<std::vector<CorrelationGroup>> groups_override) {
  if (d.n_rows() == 0 || d.n_dims() == 0) throw Error(ErrorCode::InvalidArgument, "cannot index an empty dataset");

  CoaxIndex ix;
  ix.n_dims_ = d.n_dims();
  if (groups_override) {
    ix.groups_ = std::move(*groups_override);
  } else if (d.n_dims() >= 2) {
    ix.groups_ = learn_groups(d, cfg.detect);
  }
  validate_groups(ix.groups_, d.n_dims());

  const SplitResult split = split_data(d, ix.groups_);
  if (split.primary_rows.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no row conforms to the soft dependency models");
  }

  std::size_t sort_dim = 0;
  if (cfg.sort_dim) {
    sort_dim = *cfg.sort_dim;
  } else if (!ix.groups_.empty()) {
    const auto largest = std::max_element(ix.groups_.begin(), ix.groups_.end(),
                                          [](const CorrelationGroup& a, const CorrelationGroup& b) {
                                            return a.models.size() < b.models.size();
                                          });
    sort_dim = largest->predictor;
  }
  const auto dependents = ix.dependent_dims();
  if (sort_dim >= d.n_dims() || std::find(dependents.begin(), dependents.end(), sort_dim) != dependents.end()) {
    throw Error(ErrorCode::InvalidArgument, "primary sort dimension must be an indexed dimension");
  }

  GridConfig primary_cfg;
  for (std::size_t dim : ix.indexed_dims()) {
    if (dim != sort_dim) primary_cfg.grid_dims.push_back(dim);
  }
  primary_cfg.sort_dim = sort_dim;
  primary_cfg.cells_per_dim = cfg.cells_per_dim;
  primary_cfg.mode = GridMode::Quantile;
  ix.primary_ = GridIndex::build(d, split.primary_rows, primary_cfg);

  ix.outlier_bbox_.assign(d.n_dims(), Interval::empty_interval());
  if (!split.outlier_rows.empty()) {
    GridConfig out_cfg;
    for (std::size_t dim = 0; dim < d.n_dims(); ++dim) {
      if (dim != sort_dim) out_cfg.grid_dims.push_back(dim);
    }
    out_cfg.sort_dim = sort_dim;
    out_cfg.cells_per_dim = cfg.outlier_cells_per_dim.value_or(
        default_outlier_cells(split.outlier_rows.size(), d.n_rows(), out_cfg.grid_dims.size(),
                              cfg.cells_per_dim, out_cfg.max_cells));
    out_cfg.mode = GridMode::Quantile;
    ix.outliers_ = GridIndex::build(d, split.outlier_rows, out_cfg);
    ix.outlier_bbox_ = ix.outliers_->bounds();
  }
  return ix;
}

std::vector<std::size_t> CoaxIndex::dependent_dims() const {
  std::vector<std::size_t> out;
  for (const auto& g : groups_) {
    for (const auto& m : g.models) out.push_back(m.dependent_dim);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> CoaxIndex::indexed_dims() const {
  const auto dependents = dependent_dims();
  std::vector<std::size_t> out;
  for (std::size_t dim = 0; dim < n_dims_; ++dim) {
    if (!std::binary_search(dependents.begin(), dependents.end(), dim)) out.push_back(dim);
  }
  return out;
}

std::optional<QueryRect> CoaxIndex::translate_query(const QueryRect& q) const {
  QueryRect reduced = q;
  for (const auto& g : groups_) {
    Interval predictor = q[g.predictor];
    for (const auto& m : g.models) {
      const Interval& y = q[m.dependent_dim];
      if (y.unbounded()) continue;
      predictor = translated_scan_range(m, predictor.lo, predictor.hi, y.lo, y.hi);
      if (predictor.empty()) return std::nullopt;
    }
    reduced[g.predictor] = predictor;
  }
  return reduced;
}

CoaxQueryResult CoaxIndex::query(const QueryRect& q) const {
  if (q.n_dims() != n_dims_) throw Error(ErrorCode::InvalidArgument, "query dimensionality does not match index");
  CoaxQueryResult out;
  if (q.empty()) {
    out.primary_skipped = out.outlier_skipped = true;
    return out;
  }

  // The primary grid filters every dimension of the rectangle it receives, so
  // candidates are re-checked against the original dependent constraints.
  if (auto reduced = translate_query(q)) {
    auto r = primary_.range_query(*reduced);
    out.rows = std::move(r.rows);
    out.primary = r.stats;
  } else {
    out.primary_skipped = true;
  }

  bool touches_outliers = outliers_.has_value();
  for (std::size_t dim = 0; dim < n_dims_ && touches_outliers; ++dim) {
    touches_outliers = q[dim].intersects(outlier_bbox_[dim]);
  }
  if (touches_outliers) {
    auto r = outliers_->range_query(q);
    out.rows.insert(out.rows.end(), r.rows.begin(), r.rows.end());
    out.outlier = r.stats;
  } else {
    out.outlier_skipped = true;
  }
  return out;
}

CoaxQueryResult CoaxIndex::point_query(const std::vector<double>& point) const {
  return query(QueryRect::point(point));
}

IndexStats CoaxIndex::stats() const {
  IndexStats s;
  s.primary_rows = primary_.n_rows();
  s.outlier_rows = outliers_ ? outliers_->n_rows() : 0;
  s.n_rows = s.primary_rows + s.outlier_rows;
  s.primary_ratio = s.n_rows ? static_cast<double>(s.primary_rows) / static_cast<double>(s.n_rows) : 0.0;
  s.dependent_dims = dependent_dims().size();
  s.indexed_dims = n_dims_ - s.dependent_dims;
  s.primary_grid_dims = primary_.grid_dims().size();
  s.primary_directory_bytes = primary_.directory_bytes();
  s.outlier_directory_bytes = outliers_ ? outliers_->directory_bytes() : 0;
  return s;
}

// Snapshot layout (little-endian):
//   char magic[8] = "COAXIDX\0", u32 version, u32 n_dims,
//   u32 n_groups, per group: u32 predictor, u32 n_models,
//     per model: u32 indexed_dim, u32 dependent_dim, f64 m, b, eps_lb, eps_ub, fit_quality
//   primary GridIndex, u8 has_outliers, [outlier GridIndex]
void CoaxIndex::write(std::ostream& out) const {
  using namespace detail;
  out.write(kMagic, sizeof kMagic);
  put_u32(out, kSnapshotVersion);
  put_u32(out, static_cast<std::uint32_t>(n_dims_));
  put_u32(out, static_cast<std::uint32_t>(groups_.size()));
  for (const auto& g : groups_) {
    put_u32(out, static_cast<std::uint32_t>(g.predictor));
    put_u32(out, static_cast<std::uint32_t>(g.models.size()));
    for (const auto& m : g.models) {
      put_u32(out, static_cast<std::uint32_t>(m.indexed_dim));
      put_u32(out, static_cast<std::uint32_t>(m.dependent_dim));
      put_f64(out, m.m);
      put_f64(out, m.b);
      put_f64(out, m.eps_lb);
      put_f64(out, m.eps_ub);
      put_f64(out, m.fit_quality);
    }
  }
  primary_.write(out);
  put_u8(out, outliers_ ? 1 : 0);
  if (outliers_) outliers_->write(out);
}

CoaxIndex CoaxIndex::read(std::istream& in) {
  using namespace detail;
  char magic[8];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + 8, kMagic)) {
    throw Error(ErrorCode::Parse, "not a COAX index snapshot");
  }
  if (get_u32(in) != kSnapshotVersion) throw Error(ErrorCode::Parse, "unsupported snapshot version");
  CoaxIndex ix;
  ix.n_dims_ = get_u32(in);
  const std::uint32_t n_groups = get_u32(in);
  if (n_groups > ix.n_dims_) throw Error(ErrorCode::Parse, "group count out of range in snapshot");
  for (std::uint32_t i = 0; i < n_groups; ++i) {
    CorrelationGroup g;
    g.predictor = get_u32(in);
    const std::uint32_t n_models = get_u32(in);
    if (n_models > ix.n_dims_) throw Error(ErrorCode::Parse, "model count out of range in snapshot");
    for (std::uint32_t k = 0; k < n_models; ++k) {
      SoftFdModel m;
      m.indexed_dim = get_u32(in);
      m.dependent_dim = get_u32(in);
      m.m = get_f64(in);
      m.b = get_f64(in);
      m.eps_lb = get_f64(in);
      m.eps_ub = get_f64(in);
      m.fit_quality = get_f64(in);
      g.models.push_back(m);
    }
    ix.groups_.push_back(std::move(g));
  }
  validate_groups(ix.groups_, ix.n_dims_);
  ix.primary_ = GridIndex::read(in);
  if (ix.primary_.n_dims() != ix.n_dims_) throw Error(ErrorCode::Parse, "primary grid dimensionality mismatch");
  ix.outlier_bbox_.assign(ix.n_dims_, Interval::empty_interval());
  if (get_u8(in) != 0) {
    ix.outliers_ = GridIndex::read(in);
    if (ix.outliers_->n_dims() != ix.n_dims_) throw Error(ErrorCode::Parse, "outlier grid dimensionality mismatch");
    ix.outlier_bbox_ = ix.outliers_->bounds();
  }
  return ix;
}

void CoaxIndex::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  write(out);
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

CoaxIndex CoaxIndex::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return read(in);
}

}  // namespace coax
