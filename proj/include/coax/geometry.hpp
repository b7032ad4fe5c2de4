#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

namespace coax {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed real interval [lo, hi]; either end may be infinite. The canonical
/// empty interval is {+inf, -inf}.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  static constexpr Interval all() { return {-kInf, kInf}; }
  static constexpr Interval empty_interval() { return {kInf, -kInf}; }
  static constexpr Interval point(double v) { return {v, v}; }

  bool empty() const { return !(lo <= hi); }
  bool unbounded() const { return lo == -kInf && hi == kInf; }
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool intersects(const Interval& o) const { return !empty() && !o.empty() && lo <= o.hi && o.lo <= hi; }

  Interval intersect(const Interval& o) const {
    Interval r{std::max(lo, o.lo), std::min(hi, o.hi)};
    return r.empty() ? empty_interval() : r;
  }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned query rectangle with one closed interval per dataset dimension.
/// Unconstrained dimensions carry (-inf, +inf); a point query has lo == hi.
class QueryRect {
 public:
  QueryRect() = default;
  explicit QueryRect(std::size_t n_dims) : dims_(n_dims, Interval::all()) {}
  explicit QueryRect(std::vector<Interval> dims) : dims_(std::move(dims)) {}

  static QueryRect point(const std::vector<double>& coords) {
    QueryRect q(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) q[i] = Interval::point(coords[i]);
    return q;
  }

  std::size_t n_dims() const noexcept { return dims_.size(); }
  Interval& operator[](std::size_t d) { return dims_[d]; }
  const Interval& operator[](std::size_t d) const { return dims_[d]; }
  const std::vector<Interval>& intervals() const noexcept { return dims_; }

  bool empty() const {
    return std::any_of(dims_.begin(), dims_.end(), [](const Interval& i) { return i.empty(); });
  }

  template <class Row>
  bool contains(const Row& row) const {
    for (std::size_t d = 0; d < dims_.size(); ++d) {
      if (!dims_[d].contains(row[d])) return false;
    }
    return true;
  }

 private:
  std::vector<Interval> dims_;
};

}  // namespace coax
