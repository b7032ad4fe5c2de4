#pragma once

#include "coax/geometry.hpp"
#include "coax/softfd.hpp"

namespace coax {

inline double predict(const SoftFdModel& model, double x) { return model.predict(x); }

/// Interval of indexed values x whose margin band
/// [m*x + b - eps_lb, m*x + b + eps_ub] meets [y_lo, y_hi].
///
/// The result is widened outward by a few ulps of the operands' magnitude, so
/// every record that passes `SoftFdModel::conforms` and has d in [y_lo, y_hi]
/// lies inside it despite rounding. Throws on m == 0 or y_lo > y_hi.
Interval dependent_range_to_indexed(const SoftFdModel& model, double y_lo, double y_hi);

/// [x_lo, x_hi] intersected with the translated dependent range; EMPTY if disjoint.
Interval translated_scan_range(const SoftFdModel& model, double x_lo, double x_hi, double y_lo,
                               double y_hi);

// Closed-form band geometry for a symmetric margin eps around y = a*x and a
// dependent-axis query of height q_y.

/// Area of the true result region: q_y * 2 eps / a.
double result_area(double q_y, double eps, double a);

/// Area the index scans: 2 eps (2 eps + q_y) / a.
double scanned_area(double q_y, double eps, double a);

/// result_area / scanned_area = q_y / (2 eps + q_y).
double effectiveness(double q_y, double eps);

}  // namespace coax
