#include "krigopt/flowrate.hpp"

#include <cmath>

namespace krigopt {

double FlowCurve::max_residual() const {
  return residuals.size() == 0 ? 0.0 : residuals.cwiseAbs().maxCoeff();
}

FlowCurve fit_quadratic(const Matrix& points) {
  const Eigen::Index n = points.rows();
  if (points.cols() != 2) {
    throw DimensionMismatch("fit_quadratic: points must have exactly two columns (Q, R), got " +
                            std::to_string(points.cols()));
  }
  if (n < 3) {
    throw InsufficientPoints("fit_quadratic: at least 3 points required, got " +
                             std::to_string(n));
  }
  if (!points.allFinite()) {
    throw NonFiniteValue("fit_quadratic: points contain a non-finite value");
  }

  const Vector q = points.col(0);
  const Vector r = points.col(1);
  const double tol = 1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(q[i] - q[j]) <= tol) {
        throw DegenerateAbscissae("fit_quadratic: flow rates " + std::to_string(i) + " and " +
                                  std::to_string(j) + " coincide");
      }
    }
  }

  // Solve in centered, scaled abscissae so the Vandermonde stays well
  // conditioned regardless of the magnitude of the flow rates.
  const double q_min = q.minCoeff();
  const double q_max = q.maxCoeff();
  const double center = 0.5 * (q_min + q_max);
  const double scale = 0.5 * (q_max - q_min);
  const Vector u = (q.array() - center) / scale;

  Matrix vandermonde(n, 3);
  vandermonde.col(0) = u.cwiseProduct(u);
  vandermonde.col(1) = u;
  vandermonde.col(2).setOnes();

  Eigen::ColPivHouseholderQR<Matrix> qr(vandermonde);
  if (qr.rank() < 3) {
    throw DegenerateAbscissae("fit_quadratic: flow rates are numerically indistinguishable");
  }
  const Vector coeff = qr.solve(r);

  FlowCurve curve;
  // p(q) = au (q-c)^2/s^2 + bu (q-c)/s + cu, expanded back to a q^2 + b q + c
  curve.a = coeff[0] / (scale * scale);
  curve.b = coeff[1] / scale - 2.0 * coeff[0] * center / (scale * scale);
  curve.c = coeff[2] - coeff[1] * center / scale + coeff[0] * center * center / (scale * scale);
  curve.fitted = vandermonde * coeff;
  curve.residuals = r - curve.fitted;
  return curve;
}

double evaluate(const FlowCurve& curve, double q) {
  if (!std::isfinite(q)) {
    throw NonFiniteValue("evaluate: flow rate must be finite");
  }
  return (curve.a * q + curve.b) * q + curve.c;
}

double efficiency_from(double flow_rate, double pressure_rise, double torque,
                       double angular_speed) {
  if (!std::isfinite(flow_rate) || !std::isfinite(pressure_rise) || !std::isfinite(torque) ||
      !std::isfinite(angular_speed)) {
    throw NonFiniteValue("efficiency_from: all measurements must be finite");
  }
  if (flow_rate < 0.0 || pressure_rise < 0.0) {
    throw NonPhysical("efficiency_from: flow rate and pressure rise must be non-negative");
  }
  if (torque <= 0.0 || angular_speed <= 0.0) {
    throw NonPhysical("efficiency_from: torque and angular speed must be positive");
  }
  return (flow_rate * pressure_rise) / (torque * angular_speed);
}

}  // namespace krigopt
