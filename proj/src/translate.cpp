#include "coax/translate.hpp"

#include <cmath>
#include <limits>

#include "coax/error.hpp"

namespace coax {

namespace {

// Relative slack covering the rounding of d - (m*x + b) in the conformance test
// and of the division below; far above the handful of ulps actually needed.
constexpr double kRoundingSlack = 1e-12;

double finite_abs(double v) { return std::isfinite(v) ? std::abs(v) : 0.0; }

}  // namespace

Interval dependent_range_to_indexed(const SoftFdModel& model, double y_lo, double y_hi) {
  if (model.m == 0.0) throw Error(ErrorCode::InvalidArgument, "zero-slope model cannot be inverted");
  if (y_lo > y_hi) throw Error(ErrorCode::InvalidArgument, "dependent range has lo > hi");

  const double lo_edge = (y_lo - model.b - model.eps_ub) / model.m;
  const double hi_edge = (y_hi - model.b + model.eps_lb) / model.m;
  Interval r = model.m > 0.0 ? Interval{lo_edge, hi_edge} : Interval{hi_edge, lo_edge};

  const double scale = finite_abs(y_lo) + finite_abs(y_hi) + std::abs(model.b) + model.eps_lb +
                       model.eps_ub;
  const double pad = kRoundingSlack * scale / std::abs(model.m);
  r.lo -= pad + kRoundingSlack * finite_abs(r.lo);
  r.hi += pad + kRoundingSlack * finite_abs(r.hi);
  // Both limits may collapse to the same infinity when the query is one-sided
  // far outside the band's reach.
  return r.empty() ? Interval::empty_interval() : r;
}

Interval translated_scan_range(const SoftFdModel& model, double x_lo, double x_hi, double y_lo,
                               double y_hi) {
  Interval x{x_lo, x_hi};
  if (x.empty() || y_lo > y_hi) return Interval::empty_interval();
  if (y_lo == -kInf && y_hi == kInf) return x;
  return x.intersect(dependent_range_to_indexed(model, y_lo, y_hi));
}

double result_area(double q_y, double eps, double a) {
  if (q_y < 0.0 || eps < 0.0 || !(a > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "result_area needs q_y >= 0, eps >= 0, a > 0");
  }
  return q_y * 2.0 * eps / a;
}

double scanned_area(double q_y, double eps, double a) {
  if (q_y < 0.0 || eps < 0.0 || !(a > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "scanned_area needs q_y >= 0, eps >= 0, a > 0");
  }
  return 2.0 * eps * (2.0 * eps + q_y) / a;
}

double effectiveness(double q_y, double eps) {
  if (q_y < 0.0 || eps < 0.0 || (q_y == 0.0 && eps == 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "effectiveness needs q_y, eps >= 0, not both zero");
  }
  return q_y / (2.0 * eps + q_y);
}

}  // namespace coax
