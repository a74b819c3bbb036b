#pragma once

#include <cstdint>

#include "krigopt/kriging.hpp"

namespace krigopt {

// Cross-validation quality metrics, computed from observed responses y,
// leave-one-out predictions yhat, and leave-one-out standard deviations sd:
//   r_squared: 1 - sum((y - yhat)^2) / sum((y - mean(y))^2)
//   rmse:      sqrt(mean((y - yhat)^2))
//   rma:       max_i |y_i - yhat_i| / population-sd(y)  (relative maximal
//              absolute error)
//   cr95:      fraction of points with |y_i - yhat_i| <= 1.96 sd_i
struct MetricsReport {
  double r_squared = 0.0;
  double rmse = 0.0;
  double rma = 0.0;
  double cr95 = 0.0;
};

MetricsReport loo_metrics(const Vector& y, const Vector& yhat, const Vector& sd);

// m x m posterior correlation matrix across the rows of `points`: the
// posterior covariance with each entry divided by the two matching posterior
// standard deviations.  Unit diagonal; raises DegenerateData when a point
// has (numerically) zero predictive variance.
Matrix conditional_correlation(const GpModel& model, const Matrix& points);

// Distribution of the batch improvement over a fixed reference value:
// samples[k] = max_j Y_k(x_j) - reference_best for joint posterior draws
// Y_k, reported unclamped so mass below zero stays visible.  a_posteriori is
// the same statistic evaluated at the model's predictive means instead of
// random draws.
struct EiDistribution {
  Vector samples;
  double a_posteriori = 0.0;
};

EiDistribution ei_posterior_distribution(const GpModel& model, const Matrix& batch,
                                         double reference_best, int draws, std::uint64_t seed);

// Ordinary least squares with intercept: coefficients = (intercept,
// slope_1..slope_d), fitted = predictions at the training inputs.  Raises
// RankDeficient when the design columns are linearly dependent and
// InsufficientPoints when fewer than d + 1 rows are given.
struct LinearFit {
  Vector coefficients;
  Vector fitted;

  double rmse(const Vector& y) const;
};

LinearFit fit_linear_baseline(const Matrix& x, const Vector& y);

}  // namespace krigopt
