#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "coax/dataset.hpp"

namespace coax {

/// chunks x chunks density grid over a pair of min-shifted attributes.
struct BucketGrid {
  std::size_t chunks = 0;
  double w_x = 0.0;
  double w_d = 0.0;
  std::vector<std::size_t> counts;  // row-major, counts[i * chunks + j]

  std::size_t count(std::size_t i, std::size_t j) const { return counts[i * chunks + j]; }
  std::size_t total() const;
};

/// Cell centres of a BucketGrid, each repeated once per member point.
struct TrainingSet {
  std::vector<double> xs;
  std::vector<double> ds;
};

struct LinearFit {
  double m = 0.0;
  double b = 0.0;
};

/// Learned soft dependency indexed_dim -> dependent_dim with asymmetric margins:
/// a conforming record satisfies -eps_lb <= d - (m*x + b) <= eps_ub.
struct SoftFdModel {
  std::size_t indexed_dim = 0;
  std::size_t dependent_dim = 0;
  double m = 0.0;
  double b = 0.0;
  double eps_lb = 0.0;
  double eps_ub = 0.0;
  double fit_quality = 0.0;

  double predict(double x) const { return m * x + b; }
  double displacement(double x, double d) const { return d - (m * x + b); }
  bool conforms(double x, double d) const {
    const double disp = displacement(x, d);
    return -eps_lb <= disp && disp <= eps_ub;
  }

  friend bool operator==(const SoftFdModel&, const SoftFdModel&) = default;
};

struct CorrelationGroup {
  std::size_t predictor = 0;
  std::vector<SoftFdModel> models;  // all with indexed_dim == predictor

  friend bool operator==(const CorrelationGroup&, const CorrelationGroup&) = default;
};

struct SplitResult {
  std::vector<RowId> primary_rows;
  std::vector<RowId> outlier_rows;
};

struct DetectConfig {
  std::size_t sample_count = 100000;
  std::size_t chunks = 100;
  std::optional<double> threshold;  // default: max(1, 2 * sample / chunks^2)
  double target_ratio = 0.9;
  double min_quality = 0.75;
  std::uint64_t seed = 42;

  /// The density threshold actually used for a sample of `effective_sample` points.
  double effective_threshold(std::size_t effective_sample) const;
};

BucketGrid bucketize(std::span<const double> xs, std::span<const double> ds, std::size_t chunks);

TrainingSet dense_centers(const BucketGrid& g, double threshold);

/// Ordinary least squares d = m*x + b. Throws DegenerateError unless the
/// training set holds at least two distinct x values.
LinearFit fit_linear(const TrainingSet& t);

/// Margins at displacement quantiles ((1-r)/2, 1-(1-r)/2), floored at zero.
std::pair<double, double> select_margins(std::span<const double> displacements, double target_ratio);

/// Learns the x -> d model for one orientation of one attribute pair over the
/// given sample rows. Returns nullopt when any stage (width, density, fit,
/// slope, quality, informativeness) rejects the pair.
std::optional<SoftFdModel> fit_pair(const Dataset& d, std::span<const RowId> sample_rows,
                                    std::size_t x_dim, std::size_t d_dim, const DetectConfig& cfg);

/// One model per correlated attribute pair, sorted by (indexed_dim, dependent_dim).
std::vector<SoftFdModel> detect_pairs(const Dataset& d, const DetectConfig& cfg);

/// Merges models sharing an attribute into groups with a single predictor.
/// Dependents without a direct model from the chosen predictor are refitted
/// against it on the same sample; a dependent whose refit is rejected leaves
/// the group.
std::vector<CorrelationGroup> merge_groups(const Dataset& d, const std::vector<SoftFdModel>& models,
                                           const DetectConfig& cfg);

SplitResult split_data(const Dataset& d, const std::vector<CorrelationGroup>& groups);

/// Convenience: detect_pairs followed by merge_groups.
std::vector<CorrelationGroup> learn_groups(const Dataset& d, const DetectConfig& cfg);

}  // namespace coax
