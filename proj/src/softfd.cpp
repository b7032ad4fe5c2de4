#include "coax/softfd.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "coax/error.hpp"

namespace coax {

std::size_t BucketGrid::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

double DetectConfig::effective_threshold(std::size_t effective_sample) const {
  if (threshold) return *threshold;
  const double cells = static_cast<double>(chunks) * static_cast<double>(chunks);
  return std::max(1.0, 2.0 * static_cast<double>(effective_sample) / cells);
}

namespace {

double axis_width(double max_value, std::size_t chunks, const char* axis) {
  const double w = max_value / static_cast<double>(chunks);
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw DegenerateError(std::string("zero bucket width on the ") + axis + " axis");
  }
  return w;
}

// Cell index along one axis with the maximum clamped into the last cell.
// Returns chunks for values outside [0, max_value].
std::size_t cell_of(double v, double w, double max_value, std::size_t chunks) {
  if (!(v >= 0.0 && v <= max_value)) return chunks;
  return std::min(static_cast<std::size_t>(v / w), chunks - 1);
}

}  // namespace

BucketGrid bucketize(std::span<const double> xs, std::span<const double> ds, std::size_t chunks) {
  if (xs.size() != ds.size() || xs.empty()) {
    throw Error(ErrorCode::InvalidArgument, "bucketize needs equally sized, nonempty inputs");
  }
  if (chunks < 2) throw Error(ErrorCode::InvalidArgument, "bucketize needs at least 2 chunks");
  BucketGrid g;
  g.chunks = chunks;
  const double x_max = *std::max_element(xs.begin(), xs.end());
  const double d_max = *std::max_element(ds.begin(), ds.end());
  g.w_x = axis_width(x_max, chunks, "x");
  g.w_d = axis_width(d_max, chunks, "d");
  g.counts.assign(chunks * chunks, 0);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const std::size_t i = cell_of(xs[k], g.w_x, x_max, chunks);
    const std::size_t j = cell_of(ds[k], g.w_d, d_max, chunks);
    if (i < chunks && j < chunks) ++g.counts[i * chunks + j];
  }
  return g;
}

TrainingSet dense_centers(const BucketGrid& g, double threshold) {
  if (threshold < 0.0) throw Error(ErrorCode::InvalidArgument, "threshold must be nonnegative");
  TrainingSet t;
  for (std::size_t i = 0; i < g.chunks; ++i) {
    for (std::size_t j = 0; j < g.chunks; ++j) {
      const std::size_t c = g.count(i, j);
      if (static_cast<double>(c) > threshold) {
        t.xs.insert(t.xs.end(), c, (static_cast<double>(i) + 0.5) * g.w_x);
        t.ds.insert(t.ds.end(), c, (static_cast<double>(j) + 0.5) * g.w_d);
      }
    }
  }
  if (t.xs.empty()) throw DegenerateError("no bucket exceeds the density threshold");
  return t;
}

LinearFit fit_linear(const TrainingSet& t) {
  if (t.xs.size() != t.ds.size()) {
    throw Error(ErrorCode::InvalidArgument, "training set columns differ in length");
  }
  const std::size_t n = t.xs.size();
  if (n < 2) throw DegenerateError("linear fit needs at least two points");
  const double mx = std::accumulate(t.xs.begin(), t.xs.end(), 0.0) / static_cast<double>(n);
  const double md = std::accumulate(t.ds.begin(), t.ds.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0;
  double sxd = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = t.xs[k] - mx;
    sxx += dx * dx;
    sxd += dx * (t.ds[k] - md);
  }
  if (!(sxx > 0.0)) throw DegenerateError("linear fit needs two distinct x values");
  LinearFit f;
  f.m = sxd / sxx;
  f.b = md - f.m * mx;
  return f;
}

std::pair<double, double> select_margins(std::span<const double> displacements, double target_ratio) {
  if (displacements.empty()) throw Error(ErrorCode::InvalidArgument, "no displacements");
  if (!(target_ratio > 0.0 && target_ratio <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "target ratio must lie in (0, 1]");
  }
  std::vector<double> sorted(displacements.begin(), displacements.end());
  std::sort(sorted.begin(), sorted.end());
  const double tail = (1.0 - target_ratio) / 2.0;
  const double lower = quantile_sorted(sorted, tail);
  const double upper = quantile_sorted(sorted, 1.0 - tail);
  return {std::max(0.0, -lower), std::max(0.0, upper)};
}

std::optional<SoftFdModel> fit_pair(const Dataset& d, std::span<const RowId> sample_rows,
                                    std::size_t x_dim, std::size_t d_dim, const DetectConfig& cfg) {
  if (x_dim == d_dim || x_dim >= d.n_dims() || d_dim >= d.n_dims() || sample_rows.empty()) {
    return std::nullopt;
  }
  std::vector<double> xs, ds;
  xs.reserve(sample_rows.size());
  ds.reserve(sample_rows.size());
  for (RowId r : sample_rows) {
    xs.push_back(d.at(r, x_dim));
    ds.push_back(d.at(r, d_dim));
  }
  const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
  const auto [dmin_it, dmax_it] = std::minmax_element(ds.begin(), ds.end());
  const double xmin = *xmin_it, dmin = *dmin_it, drange = *dmax_it - dmin;

  std::vector<double> xs_shift(xs.size()), ds_shift(ds.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    xs_shift[k] = xs[k] - xmin;
    ds_shift[k] = ds[k] - dmin;
  }

  LinearFit fit;
  try {
    auto grid = bucketize(xs_shift, ds_shift, cfg.chunks);
    auto train = dense_centers(grid, cfg.effective_threshold(sample_rows.size()));
    fit = fit_linear(train);
  } catch (const DegenerateError&) {
    return std::nullopt;
  }

  SoftFdModel model;
  model.indexed_dim = x_dim;
  model.dependent_dim = d_dim;
  model.m = fit.m;
  // Undo the min shift: d - dmin = m (x - xmin) + b'.
  model.b = fit.b + dmin - fit.m * xmin;
  if (model.m == 0.0 || !std::isfinite(model.m) || !std::isfinite(model.b)) return std::nullopt;

  std::vector<double> disp(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) disp[k] = model.displacement(xs[k], ds[k]);
  std::tie(model.eps_lb, model.eps_ub) = select_margins(disp, cfg.target_ratio);

  std::size_t inside = 0;
  for (double v : disp) inside += (-model.eps_lb <= v && v <= model.eps_ub) ? 1 : 0;
  model.fit_quality = static_cast<double>(inside) / static_cast<double>(disp.size());

  // The band must be narrow against the dependent range, and the line must
  // move by more than the band across the central mass of the predictor
  // (same quantile levels as the margins); otherwise the predictor says
  // nothing about the dependent. A near-flat fit against a heavy-tailed
  // column passes the first test alone.
  const double band = model.eps_lb + model.eps_ub;
  std::vector<double> xs_sorted = std::move(xs_shift);
  std::sort(xs_sorted.begin(), xs_sorted.end());
  const double tail = (1.0 - cfg.target_ratio) / 2.0;
  const double xspread = quantile_sorted(xs_sorted, 1.0 - tail) - quantile_sorted(xs_sorted, tail);
  const bool informative = band <= 0.5 * drange && std::abs(model.m) * xspread > band;
  if (model.fit_quality < cfg.min_quality || !informative) return std::nullopt;
  return model;
}

std::vector<SoftFdModel> detect_pairs(const Dataset& d, const DetectConfig& cfg) {
  if (d.n_dims() < 2) throw Error(ErrorCode::InvalidArgument, "dependency detection needs at least 2 dimensions");
  const auto rows = sample_indices(d, cfg.sample_count, cfg.seed);
  std::vector<SoftFdModel> out;
  for (std::size_t i = 0; i < d.n_dims(); ++i) {
    for (std::size_t j = i + 1; j < d.n_dims(); ++j) {
      auto forward = fit_pair(d, rows, i, j, cfg);
      auto backward = fit_pair(d, rows, j, i, cfg);
      if (forward && (!backward || forward->fit_quality >= backward->fit_quality)) {
        out.push_back(*forward);
      } else if (backward) {
        out.push_back(*backward);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const SoftFdModel& a, const SoftFdModel& b) {
    return std::pair(a.indexed_dim, a.dependent_dim) < std::pair(b.indexed_dim, b.dependent_dim);
  });
  return out;
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<CorrelationGroup> merge_groups(const Dataset& d, const std::vector<SoftFdModel>& models,
                                           const DetectConfig& cfg) {
  if (models.empty()) return {};
  std::size_t n = d.n_dims();
  for (const auto& m : models) n = std::max({n, m.indexed_dim + 1, m.dependent_dim + 1});

  DisjointSets sets(n);
  std::vector<bool> involved(n, false);
  std::vector<double> score(n, 0.0);
  for (const auto& m : models) {
    sets.unite(m.indexed_dim, m.dependent_dim);
    involved[m.indexed_dim] = involved[m.dependent_dim] = true;
    score[m.indexed_dim] += m.fit_quality;
  }

  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t dim = 0; dim < n; ++dim) {
    if (involved[dim]) components[sets.find(dim)].push_back(dim);
  }

  std::vector<RowId> rows;  // sampled lazily, only if a refit is needed
  std::vector<CorrelationGroup> groups;
  for (const auto& [root, dims] : components) {
    std::size_t predictor = dims.front();
    for (std::size_t dim : dims) {
      if (score[dim] > score[predictor]) predictor = dim;
    }
    CorrelationGroup g;
    g.predictor = predictor;
    for (std::size_t dim : dims) {
      if (dim == predictor) continue;
      auto direct = std::find_if(models.begin(), models.end(), [&](const SoftFdModel& m) {
        return m.indexed_dim == predictor && m.dependent_dim == dim;
      });
      if (direct != models.end()) {
        g.models.push_back(*direct);
        continue;
      }
      if (rows.empty()) rows = sample_indices(d, cfg.sample_count, cfg.seed);
      if (auto refit = fit_pair(d, rows, predictor, dim, cfg)) g.models.push_back(*refit);
    }
    if (!g.models.empty()) groups.push_back(std::move(g));
  }
  std::sort(groups.begin(), groups.end(),
            [](const CorrelationGroup& a, const CorrelationGroup& b) { return a.predictor < b.predictor; });
  return groups;
}

SplitResult split_data(const Dataset& d, const std::vector<CorrelationGroup>& groups) {
  std::vector<const SoftFdModel*> models;
  for (const auto& g : groups) {
    for (const auto& m : g.models) {
      if (m.indexed_dim >= d.n_dims() || m.dependent_dim >= d.n_dims()) {
        throw Error(ErrorCode::InvalidArgument, "model references a dimension outside the dataset");
      }
      models.push_back(&m);
    }
  }
  SplitResult out;
  out.primary_rows.reserve(d.n_rows());
  for (RowId r = 0; r < d.n_rows(); ++r) {
    const bool conforming = std::all_of(models.begin(), models.end(), [&](const SoftFdModel* m) {
      return m->conforms(d.at(r, m->indexed_dim), d.at(r, m->dependent_dim));
    });
    (conforming ? out.primary_rows : out.outlier_rows).push_back(r);
  }
  return out;
}

std::vector<CorrelationGroup> learn_groups(const Dataset& d, const DetectConfig& cfg) {
  return merge_groups(d, detect_pairs(d, cfg), cfg);
}

}  // namespace coax
