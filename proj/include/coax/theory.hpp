#pragma once

// Capacity analysis of linear soft-FD segments: closed forms for the expected
// keys a segment covers, their variance and the segment count of a stream,
// plus a Monte-Carlo gap-sequence simulator that checks them.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace coax::theory {

enum class GapDistribution { Uniform, TruncatedGaussian };

const char* to_string(GapDistribution d);

/// i.i.d. positive gaps with mean mu and standard deviation sigma.
struct GapConfig {
  double mu = 1.0;
  double sigma = 0.1;
  GapDistribution dist = GapDistribution::TruncatedGaussian;
  std::size_t n = 1'000'000;  // walk length cap / stream length
  std::uint64_t seed = 1;
};

/// Draws gaps realizing (mu, sigma). Uniform gaps span mu +- sqrt(3) sigma;
/// Gaussian gaps are truncated at zero with the underlying normal's
/// parameters solved so the truncated moments hit (mu, sigma) exactly.
class GapSampler {
 public:
  explicit GapSampler(const GapConfig& cfg);

  template <class Rng>
  double operator()(Rng& rng) {
    if (dist_ == GapDistribution::Uniform) return uniform_(rng);
    double g;
    do {
      g = normal_(rng);
    } while (!(g > 0.0));
    return g;
  }

  /// Parameters of the underlying normal before truncation.
  std::pair<double, double> normal_params() const { return {normal_.mean(), normal_.stddev()}; }

 private:
  GapDistribution dist_;
  std::uniform_real_distribution<double> uniform_;
  std::normal_distribution<double> normal_;
};

struct ExitStats {
  double mean_exit = 0.0;
  double var_exit = 0.0;
  std::size_t trials = 0;    // uncensored trials the statistics cover
  std::size_t censored = 0;  // trials that never left the band within cfg.n steps
};

/// Expected keys covered by one segment with slope mu: eps^2 / sigma^2.
double expected_keys(double eps, double sigma);

/// Expected keys with drift d = mu - slope: (eps/d) tanh(eps d / sigma^2),
/// continuous at d = 0 where it equals expected_keys.
double expected_keys_drift(double eps, double sigma, double d);

/// Variance of the keys covered by one segment: 2 eps^4 / (3 sigma^4).
double variance_keys(double eps, double sigma);

/// Segments needed for a stream of n keys: n sigma^2 / eps^2.
double expected_segments(double n, double eps, double sigma);

/// Cells a square grid needs to scan the same area t times over:
/// (Y / (t eps)) * (X / ((2 eps + q_y) / a)).
double equivalent_grid_cells(double x_range, double y_range, double a, double eps, double q_y, double t);

/// Length-to-width ratio of the band: sqrt(X^2 + Y^2) / (2 eps / sqrt(1 + a^2)).
double band_ratio(double x_range, double y_range, double a, double eps);

/// First exit of Z_i = sum_j (g_j - slope) from [-eps, eps], one independent
/// walk per trial (trial t seeded from cfg.seed and t). Walks still inside
/// after cfg.n steps are censored and excluded. Throws if every trial is
/// censored.
ExitStats simulate_exit(const GapConfig& cfg, double eps, double slope, std::size_t trials);

/// Greedy segmentation of one stream of cfg.n gaps: each segment follows slope
/// mu from its anchor until the walk leaves [-eps, eps]; the exiting key
/// anchors the next segment. Returns the number of segments.
std::size_t simulate_segments(const GapConfig& cfg, double eps);

struct CsmCenter {
  double x = 0.0;  // interval midpoint
  double y = 0.0;  // mean y of the interval's points
  std::size_t count = 0;
};

struct CsmSequence {
  std::vector<CsmCenter> centers;          // nonempty intervals, in x order
  std::vector<std::size_t> empty_intervals;  // indices of intervals with no points
  double width = 0.0;

  bool has_gaps() const { return !empty_intervals.empty(); }
};

/// Centre sequence over n_intervals equal-width intervals of [x_lo, x_hi].
/// Points outside the range are ignored.
CsmSequence csm_centers(const std::vector<std::pair<double, double>>& points, std::size_t n_intervals,
                        double x_lo, double x_hi);
/// Same, over the points' own x extent.
CsmSequence csm_centers(const std::vector<std::pair<double, double>>& points, std::size_t n_intervals);

struct ReportConfig {
  std::vector<double> eps_over_sigma{5, 10, 20};
  std::vector<double> drifts_over_sigma{-1, -0.5, -0.25, 0, 0.25, 0.5, 1};
  double drift_eps_over_sigma = 10;
  std::size_t trials = 10000;
  std::size_t n = 1'000'000;
  double mu = 1.0;
  double sigma = 0.1;
  std::uint64_t seed = 1;
};

/// JSON report with one entry per (theorem, setting):
/// {theorem, closed_form, simulated, relative_error, trials, seed, ...}.
std::string report_json(const ReportConfig& cfg);

}  // namespace coax::theory
