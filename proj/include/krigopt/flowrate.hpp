#pragma once

#include "krigopt/numerics.hpp"

namespace krigopt {

// Quadratic response curve R(Q) = a Q^2 + b Q + c fitted through flow-rate /
// response pairs.
struct FlowCurve {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  Vector fitted;     // curve values at the input flow rates
  Vector residuals;  // observed minus fitted

  // Largest absolute residual; zero (to rounding) for an exact fit.
  double max_residual() const;
};

// Fits the quadratic through the rows of `points` (column 0: flow rate Q,
// column 1: response R).  Three points give the exact interpolant; more give
// the least-squares fit.  Fewer than three rows raise InsufficientPoints and
// duplicated flow rates raise DegenerateAbscissae.
FlowCurve fit_quadratic(const Matrix& points);

// Curve value at flow rate q.
double evaluate(const FlowCurve& curve, double q);

// Fan efficiency from operating measurements:
//   efficiency = (flow_rate * pressure_rise) / (torque * angular_speed).
// Negative flow or pressure rise and non-positive torque or speed raise
// NonPhysical.
double efficiency_from(double flow_rate, double pressure_rise, double torque,
                       double angular_speed);

}  // namespace krigopt
