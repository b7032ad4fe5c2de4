#include "coax/theory.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "coax/error.hpp"

namespace coax::theory {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// For N(m, s^2) truncated to (0, inf) with alpha = -m/s:
// mean = s (lambda - alpha), var = s^2 (1 + alpha lambda - lambda^2),
// lambda = pdf(alpha) / sf(alpha). The coefficient of variation depends on
// alpha alone and rises monotonically from 0 towards 1.
struct TruncatedShape {
  double lambda_minus_alpha;
  double cv;
};

TruncatedShape truncated_shape(double alpha) {
  const double sf = normal_sf(alpha);
  // Mills-ratio asymptote keeps lambda accurate deep in the upper tail.
  const double lambda = sf > 1e-300 ? normal_pdf(alpha) / sf : alpha + 1.0 / alpha;
  const double var_unit = std::max(0.0, 1.0 + alpha * lambda - lambda * lambda);
  return {lambda - alpha, std::sqrt(var_unit) / (lambda - alpha)};
}

std::pair<double, double> truncated_normal_params(double mu, double sigma) {
  const double target = sigma / mu;
  if (target >= 0.999) {
    throw Error(ErrorCode::InvalidArgument, "a zero-truncated Gaussian cannot reach sigma/mu >= 1");
  }
  double lo = -60.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (truncated_shape(mid).cv < target ? lo : hi) = mid;
  }
  const double alpha = 0.5 * (lo + hi);
  const double s = mu / truncated_shape(alpha).lambda_minus_alpha;
  return {-alpha * s, s};
}

}  // namespace

const char* to_string(GapDistribution d) {
  return d == GapDistribution::Uniform ? "uniform" : "gaussian";
}

GapSampler::GapSampler(const GapConfig& cfg) : dist_(cfg.dist) {
  require_positive(cfg.mu, "gap mean");
  require_positive(cfg.sigma, "gap standard deviation");
  if (dist_ == GapDistribution::Uniform) {
    const double half = std::sqrt(3.0) * cfg.sigma;
    if (cfg.mu - half < 0.0) throw Error(ErrorCode::InvalidArgument, "uniform gaps would go negative");
    uniform_ = std::uniform_real_distribution<double>(cfg.mu - half, cfg.mu + half);
  } else {
    auto [m, s] = truncated_normal_params(cfg.mu, cfg.sigma);
    normal_ = std::normal_distribution<double>(m, s);
  }
}

double expected_keys(double eps, double sigma) {
  require_positive(eps, "eps");
  require_positive(sigma, "sigma");
  return eps * eps / (sigma * sigma);
}

double expected_keys_drift(double eps, double sigma, double d) {
  const double limit = expected_keys(eps, sigma);
  const double z = eps * d / (sigma * sigma);
  if (std::abs(z) < 1e-8) return limit;  // tanh(z)/z = 1 - z^2/3 + ...
  return (eps / d) * std::tanh(z);
}

double variance_keys(double eps, double sigma) {
  const double r = expected_keys(eps, sigma);
  return 2.0 * r * r / 3.0;
}

double expected_segments(double n, double eps, double sigma) {
  return n / expected_keys(eps, sigma);
}

double equivalent_grid_cells(double x_range, double y_range, double a, double eps, double q_y, double t) {
  for (double v : {x_range, y_range, a, eps, q_y, t}) require_positive(v, "grid comparison parameter");
  return (y_range / (t * eps)) * (x_range / ((2.0 * eps + q_y) / a));
}

double band_ratio(double x_range, double y_range, double a, double eps) {
  require_positive(x_range, "x range");
  require_positive(y_range, "y range");
  require_positive(eps, "eps");
  return std::hypot(x_range, y_range) / (2.0 * eps / std::sqrt(1.0 + a * a));
}

ExitStats simulate_exit(const GapConfig& cfg, double eps, double slope, std::size_t trials) {
  require_positive(eps, "eps");
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "at least one trial is required");
  GapSampler gaps(cfg);
  ExitStats s;
  double mean = 0.0, m2 = 0.0;  // Welford accumulators
  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(splitmix64(cfg.seed + t));
    double z = 0.0;
    std::size_t exit_at = 0;
    for (std::size_t i = 1; i <= cfg.n; ++i) {
      z += gaps(rng) - slope;
      if (std::abs(z) > eps) {
        exit_at = i;
        break;
      }
    }
    if (exit_at == 0) {
      ++s.censored;
      continue;
    }
    ++s.trials;
    const double x = static_cast<double>(exit_at);
    const double delta = x - mean;
    mean += delta / static_cast<double>(s.trials);
    m2 += delta * (x - mean);
  }
  if (s.trials == 0) throw Error(ErrorCode::InvalidArgument, "every trial was censored; eps is too large for n");
  s.mean_exit = mean;
  s.var_exit = s.trials > 1 ? m2 / static_cast<double>(s.trials - 1) : 0.0;
  return s;
}

std::size_t simulate_segments(const GapConfig& cfg, double eps) {
  require_positive(eps, "eps");
  GapSampler gaps(cfg);
  std::mt19937_64 rng(splitmix64(cfg.seed));
  std::size_t segments = 1;
  double z = 0.0;
  for (std::size_t i = 0; i < cfg.n; ++i) {
    z += gaps(rng) - cfg.mu;
    if (std::abs(z) > eps) {
      ++segments;
      z = 0.0;
    }
  }
  return segments;
}

CsmSequence csm_centers(const std::vector<std::pair<double, double>>& points, std::size_t n_intervals,
                        double x_lo, double x_hi) {
  if (n_intervals < 1) throw Error(ErrorCode::InvalidArgument, "at least one interval is required");
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "no points");
  if (!(x_lo <= x_hi)) throw Error(ErrorCode::InvalidArgument, "interval range has lo > hi");
  CsmSequence seq;
  seq.width = (x_hi - x_lo) / static_cast<double>(n_intervals);
  std::vector<double> sum(n_intervals, 0.0);
  std::vector<std::size_t> count(n_intervals, 0);
  for (const auto& [x, y] : points) {
    if (x < x_lo || x > x_hi) continue;
    std::size_t k = 0;
    if (seq.width > 0.0) k = std::min(static_cast<std::size_t>((x - x_lo) / seq.width), n_intervals - 1);
    sum[k] += y;
    ++count[k];
  }
  for (std::size_t k = 0; k < n_intervals; ++k) {
    if (count[k] == 0) {
      seq.empty_intervals.push_back(k);
      continue;
    }
    const double mid = x_lo + (static_cast<double>(k) + 0.5) * seq.width;
    seq.centers.push_back({mid, sum[k] / static_cast<double>(count[k]), count[k]});
  }
  return seq;
}

CsmSequence csm_centers(const std::vector<std::pair<double, double>>& points, std::size_t n_intervals) {
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "no points");
  auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                      [](const auto& a, const auto& b) { return a.first < b.first; });
  return csm_centers(points, n_intervals, lo->first, hi->first);
}

std::string report_json(const ReportConfig& cfg) {
  using nlohmann::json;
  json entries = json::array();
  auto entry = [&](const char* theorem, double closed, double simulated, std::size_t trials) {
    json e;
    e["theorem"] = theorem;
    e["closed_form"] = closed;
    e["simulated"] = simulated;
    e["relative_error"] = std::abs(simulated - closed) / closed;
    e["trials"] = trials;
    e["seed"] = cfg.seed;
    return e;
  };

  for (GapDistribution dist : {GapDistribution::TruncatedGaussian, GapDistribution::Uniform}) {
    GapConfig gc{cfg.mu, cfg.sigma, dist, cfg.n, cfg.seed};
    for (double r : cfg.eps_over_sigma) {
      const double eps = r * cfg.sigma;
      const auto ex = simulate_exit(gc, eps, cfg.mu, cfg.trials);
      auto e1 = entry("expected_keys", expected_keys(eps, cfg.sigma), ex.mean_exit, ex.trials);
      e1["eps_over_sigma"] = r;
      e1["distribution"] = to_string(dist);
      e1["censored"] = ex.censored;
      entries.push_back(e1);
      auto e3 = entry("variance_keys", variance_keys(eps, cfg.sigma), ex.var_exit, ex.trials);
      e3["eps_over_sigma"] = r;
      e3["distribution"] = to_string(dist);
      entries.push_back(e3);
    }
  }

  GapConfig gauss{cfg.mu, cfg.sigma, GapDistribution::TruncatedGaussian, cfg.n, cfg.seed};
  const double drift_eps = cfg.drift_eps_over_sigma * cfg.sigma;
  for (double ds : cfg.drifts_over_sigma) {
    const double d = ds * cfg.sigma;
    const auto ex = simulate_exit(gauss, drift_eps, cfg.mu - d, cfg.trials);
    auto e = entry("expected_keys_drift", expected_keys_drift(drift_eps, cfg.sigma, d), ex.mean_exit, ex.trials);
    e["eps_over_sigma"] = cfg.drift_eps_over_sigma;
    e["drift_over_sigma"] = ds;
    entries.push_back(e);
  }

  for (double r : cfg.eps_over_sigma) {
    const double eps = r * cfg.sigma;
    const auto segs = simulate_segments(gauss, eps);
    auto e = entry("expected_segments", expected_segments(static_cast<double>(cfg.n), eps, cfg.sigma),
                   static_cast<double>(segs), 1);
    e["eps_over_sigma"] = r;
    e["n"] = cfg.n;
    entries.push_back(e);
  }

  json doc;
  doc["config"] = {{"eps_over_sigma", cfg.eps_over_sigma},
                   {"trials", cfg.trials},
                   {"n", cfg.n},
                   {"mu", cfg.mu},
                   {"sigma", cfg.sigma},
                   {"seed", cfg.seed}};
  doc["results"] = std::move(entries);
  return doc.dump(2) + "\n";
}

}  // namespace coax::theory
