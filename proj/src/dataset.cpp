#include "coax/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include "coax/error.hpp"

namespace coax {

Dataset::Dataset(std::vector<std::vector<double>> columns, std::vector<std::string> names)
    : columns_(std::move(columns)), names_(std::move(names)) {
  n_rows_ = columns_.empty() ? 0 : columns_.front().size();
  for (const auto& c : columns_) {
    if (c.size() != n_rows_) {
      throw Error(ErrorCode::InvalidArgument, "dataset columns differ in length");
    }
    for (double v : c) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::InvalidArgument, "dataset contains a non-finite value");
      }
    }
  }
  if (names_.empty()) {
    for (std::size_t i = 0; i < columns_.size(); ++i) names_.push_back("c" + std::to_string(i));
  } else if (names_.size() != columns_.size()) {
    throw Error(ErrorCode::InvalidArgument, "dataset name count does not match column count");
  }
}

Dataset Dataset::select_rows(std::span<const RowId> rows) const {
  std::vector<std::vector<double>> cols(n_dims());
  for (std::size_t d = 0; d < n_dims(); ++d) {
    cols[d].reserve(rows.size());
    for (RowId r : rows) cols[d].push_back(columns_[d].at(r));
  }
  return Dataset(std::move(cols), names_);
}

namespace {

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(const std::string& raw, double& out) {
  std::string s = trim(raw);
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::vector<std::string> read_header(std::ifstream& in, const std::string& path) {
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Parse, "'" + path + "' has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header = split_record(line);
  for (auto& h : header) h = trim(h);
  return header;
}

}  // namespace

std::vector<std::string> csv_header(const std::string& path) {
  std::ifstream in(path);
  return read_header(in, path);
}

Dataset load_csv(const std::string& path, const std::vector<std::string>& dims) {
  std::ifstream in(path);
  std::vector<std::string> header = read_header(in, path);
  std::string line;

  std::vector<std::size_t> selected;
  if (dims.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no columns selected");
  }
  for (const auto& sel : dims) {
    auto it = std::find(header.begin(), header.end(), sel);
    if (it != header.end()) {
      selected.push_back(static_cast<std::size_t>(it - header.begin()));
    } else if (all_digits(sel) && std::stoull(sel) < header.size()) {
      selected.push_back(std::stoull(sel));
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown column '" + sel + "'");
    }
  }

  std::vector<std::vector<double>> cols(selected.size());
  std::vector<std::string> names;
  for (auto s : selected) names.push_back(header[s]);
  std::size_t dropped = 0;
  std::vector<double> row(selected.size());
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_record(line);
    bool ok = true;
    for (std::size_t i = 0; i < selected.size() && ok; ++i) {
      ok = selected[i] < fields.size() && parse_double(fields[selected[i]], row[i]);
    }
    if (!ok) {
      ++dropped;
      continue;
    }
    for (std::size_t i = 0; i < selected.size(); ++i) cols[i].push_back(row[i]);
  }
  if (cols.front().empty()) {
    throw Error(ErrorCode::Parse, "'" + path + "' has zero usable rows");
  }
  Dataset d(std::move(cols), std::move(names));
  d.set_dropped_rows(dropped);
  return d;
}

std::vector<RowId> sample_indices(const Dataset& d, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample size must be at least 1");
  std::vector<RowId> idx(d.n_rows());
  std::iota(idx.begin(), idx.end(), RowId{0});
  const std::size_t take = std::min(n, d.n_rows());
  if (take < idx.size()) {
    // Partial Fisher-Yates: the first `take` slots become the sample.
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < take; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(take);
    std::sort(idx.begin(), idx.end());
  }
  return idx;
}

Dataset sample(const Dataset& d, std::size_t n, std::uint64_t seed) {
  auto idx = sample_indices(d, n, seed);
  return d.select_rows(idx);
}

double quantile_sorted(std::span<const double> sorted, double level) {
  if (sorted.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty range");
  level = std::clamp(level, 0.0, 1.0);
  const double pos = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> quantiles(std::span<const double> values, std::size_t q) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "quantiles of an empty column");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(q);
  for (std::size_t i = 1; i <= q; ++i) {
    out.push_back(quantile_sorted(sorted, static_cast<double>(i) / static_cast<double>(q + 1)));
  }
  return out;
}

ColumnStats column_stats(const Dataset& d, std::size_t dim, std::size_t q) {
  if (dim >= d.n_dims()) throw Error(ErrorCode::InvalidArgument, "dimension out of range");
  if (q < 1) throw Error(ErrorCode::InvalidArgument, "quantile count must be at least 1");
  auto col = d.column(dim);
  if (col.empty()) throw Error(ErrorCode::InvalidArgument, "empty column");
  ColumnStats s;
  auto [mn, mx] = std::minmax_element(col.begin(), col.end());
  s.min = *mn;
  s.max = *mx;
  s.mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
  s.quantiles = quantiles(col, q);
  return s;
}

double kl_uniform_divergence(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "empty column");
  std::map<double, std::size_t> counts;
  for (double v : values) ++counts[v];
  const double n = static_cast<double>(values.size());
  const std::size_t n_unique = counts.size();
  double kl = 0.0;
  for (const auto& [value, count] : counts) {
    // ln(p * U) as a ratio of integers, so equifrequent values give exactly 0.
    const double ratio = static_cast<double>(count * n_unique) / n;
    kl += (static_cast<double>(count) / n) * std::log(ratio);
  }
  // Rounding can still leave a tiny negative residue on near-uniform columns.
  return std::max(kl, 0.0);
}

double kl_uniform_divergence(const Dataset& d, std::size_t dim) {
  if (dim >= d.n_dims()) throw Error(ErrorCode::InvalidArgument, "dimension out of range");
  return kl_uniform_divergence(d.column(dim));
}

}  // namespace coax
