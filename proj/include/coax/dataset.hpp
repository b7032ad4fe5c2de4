#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace coax {

using RowId = std::uint64_t;

/// Immutable columnar table of finite real-valued attributes.
///
/// Every column holds exactly `n_rows()` values. Construction validates both
/// invariants, so downstream code never re-checks for ragged or non-finite data.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<std::vector<double>> columns,
          std::vector<std::string> names = {});

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_dims() const noexcept { return columns_.size(); }

  std::span<const double> column(std::size_t dim) const { return columns_.at(dim); }
  double at(std::size_t row, std::size_t dim) const { return columns_[dim][row]; }
  const std::vector<std::string>& names() const noexcept { return names_; }

  /// Rows skipped during CSV ingestion because a selected field was not a
  /// finite number. Zero for programmatically built datasets.
  std::size_t dropped_rows() const noexcept { return dropped_rows_; }
  void set_dropped_rows(std::size_t n) noexcept { dropped_rows_ = n; }

  /// Copy of the given rows, in the given order.
  Dataset select_rows(std::span<const RowId> rows) const;

 private:
  std::vector<std::vector<double>> columns_;
  std::vector<std::string> names_;
  std::size_t n_rows_ = 0;
  std::size_t dropped_rows_ = 0;
};

struct ColumnStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  std::vector<double> quantiles;
};

// Loads the selected columns of a headed, comma-separated file. A selector is
// a header name, or a zero-based index when no header carries that name. Rows
// with an unparseable or non-finite selected field are dropped and counted.
Dataset load_csv(const std::string& path, const std::vector<std::string>& dims);

/// Column names from the header row of a CSV file.
std::vector<std::string> csv_header(const std::string& path);

/// Indices of min(n, n_rows) rows drawn uniformly without replacement,
/// ascending. Deterministic for a fixed seed.
std::vector<RowId> sample_indices(const Dataset& d, std::size_t n, std::uint64_t seed);

Dataset sample(const Dataset& d, std::size_t n, std::uint64_t seed);

/// Empirical quantile at `level` in [0,1] by linear interpolation between order
/// statistics of an already sorted range.
double quantile_sorted(std::span<const double> sorted, double level);

/// Quantiles at levels i/(q+1), i = 1..q.
std::vector<double> quantiles(std::span<const double> values, std::size_t q);

ColumnStats column_stats(const Dataset& d, std::size_t dim, std::size_t q);

/// D_KL(P || uniform) over the empirical distribution of distinct values,
/// natural log. Zero iff every distinct value is equally frequent.
double kl_uniform_divergence(std::span<const double> values);
double kl_uniform_divergence(const Dataset& d, std::size_t dim);

}  // namespace coax
