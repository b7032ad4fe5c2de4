#pragma once

// Synthetic data with planted linear dependencies, shared by the unit and
// acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "coax/dataset.hpp"
#include "coax/geometry.hpp"

namespace coax::testing {

struct PlantedFd {
  std::size_t predictor;
  std::size_t dependent;
  double slope;
  double intercept;
};

struct PlantedSpec {
  std::size_t n_rows = 100000;
  std::size_t n_dims = 4;
  std::vector<PlantedFd> fds;
  double outlier_fraction = 0.1;
  // Half-width of the uniform noise, as a fraction of the dependent's clean range.
  double noise = 0.02;
  std::uint64_t seed = 1;
};

struct PlantedData {
  Dataset data;
  std::vector<bool> outlier;  // rows displaced off every planted line
  std::vector<double> noise_half_width;  // per planted FD
};

// Free and predictor columns are U(0, 100). Each dependent is
// slope * x + intercept + U(-e, e). Exactly round(p * n) rows are outliers;
// their dependents are pushed off the line by 4e + U(0, R/2) (R = clean
// dependent range) with alternating sign, so half sit above and half below.
inline PlantedData make_planted(const PlantedSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> cols(spec.n_dims, std::vector<double>(spec.n_rows));
  std::vector<bool> is_dependent(spec.n_dims, false);
  for (const auto& fd : spec.fds) is_dependent[fd.dependent] = true;
  for (std::size_t j = 0; j < spec.n_dims; ++j) {
    if (is_dependent[j]) continue;
    for (auto& v : cols[j]) v = 100.0 * unit(rng);
  }

  std::vector<std::size_t> order(spec.n_rows);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_out = static_cast<std::size_t>(std::llround(spec.outlier_fraction * static_cast<double>(spec.n_rows)));
  std::vector<bool> outlier(spec.n_rows, false);
  std::vector<double> sign(spec.n_rows, 0.0);
  for (std::size_t k = 0; k < n_out; ++k) {
    outlier[order[k]] = true;
    sign[order[k]] = k % 2 == 0 ? 1.0 : -1.0;
  }

  PlantedData out;
  for (const auto& fd : spec.fds) {
    const double range = std::abs(fd.slope) * 100.0;
    const double e = spec.noise * range;
    out.noise_half_width.push_back(e);
    for (std::size_t i = 0; i < spec.n_rows; ++i) {
      double y = fd.slope * cols[fd.predictor][i] + fd.intercept + e * (2.0 * unit(rng) - 1.0);
      if (outlier[i]) y += sign[i] * (4.0 * e + 0.5 * range * unit(rng));
      cols[fd.dependent][i] = y;
    }
  }
  out.data = Dataset(std::move(cols));
  out.outlier = std::move(outlier);
  return out;
}

// Independent columns with the given per-column generator.
template <class Gen>
Dataset make_independent(std::size_t n_rows, std::size_t n_dims, std::uint64_t seed, Gen gen) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> cols(n_dims, std::vector<double>(n_rows));
  for (auto& c : cols) {
    for (auto& v : c) v = gen(rng);
  }
  return Dataset(std::move(cols));
}

inline Dataset make_uniform(std::size_t n_rows, std::size_t n_dims, std::uint64_t seed, double lo = 0.0,
                            double hi = 100.0) {
  return make_independent(n_rows, n_dims, seed, [lo, hi](auto& rng) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  });
}

// Random rectangle over a dataset: each dimension is left open, bounded on one
// side, degenerate at a data value, or a random sub-range of the data extent.
inline QueryRect random_rect(const Dataset& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_row(0, d.n_rows() - 1);
  QueryRect q(d.n_dims());
  for (std::size_t j = 0; j < d.n_dims(); ++j) {
    const auto col = d.column(j);
    const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
    const double lo = *mn, span = *mx - *mn;
    const double r = unit(rng);
    if (r < 0.3) continue;
    if (r < 0.4) {
      q[j] = {-kInf, lo + span * unit(rng)};
    } else if (r < 0.5) {
      q[j] = {lo + span * unit(rng), kInf};
    } else if (r < 0.55) {
      q[j] = Interval::point(col[pick_row(rng)]);
    } else {
      double a = lo - 0.1 * span + 1.2 * span * unit(rng);
      double b = a + span * unit(rng) * 0.6;
      q[j] = {a, b};
    }
  }
  return q;
}

}  // namespace coax::testing
