#include "krigopt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace krigopt {

MetricsReport loo_metrics(const Vector& y, const Vector& yhat, const Vector& sd) {
  const Eigen::Index n = y.size();
  if (n < 2) {
    throw InsufficientPoints("loo_metrics: at least 2 points required");
  }
  if (yhat.size() != n || sd.size() != n) {
    throw DimensionMismatch("loo_metrics: y, yhat, and sd must have equal length");
  }
  if (!y.allFinite() || !yhat.allFinite() || !sd.allFinite()) {
    throw NonFiniteValue("loo_metrics: inputs contain a non-finite value");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sd[i] < 0.0) {
      throw InvalidParameter("loo_metrics: standard deviations must be non-negative");
    }
  }

  const double mean_y = y.mean();
  const double ss_total = (y.array() - mean_y).square().sum();
  if (!(ss_total > 0.0)) {
    throw DegenerateData("loo_metrics: responses are constant; r_squared and rma undefined");
  }
  const Vector err = y - yhat;
  const double ss_err = err.squaredNorm();

  MetricsReport report;
  report.r_squared = 1.0 - ss_err / ss_total;
  report.rmse = std::sqrt(ss_err / static_cast<double>(n));
  const double sd_y = std::sqrt(ss_total / static_cast<double>(n));
  report.rma = err.cwiseAbs().maxCoeff() / sd_y;
  int covered = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(err[i]) <= 1.96 * sd[i]) {
      ++covered;
    }
  }
  report.cr95 = static_cast<double>(covered) / static_cast<double>(n);
  return report;
}

Matrix conditional_correlation(const GpModel& model, const Matrix& points) {
  const Matrix cov = model.posterior_cov(points);
  const Eigen::Index m = cov.rows();
  Vector sd(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(cov(i, i) > 0.0)) {
      throw DegenerateData("conditional_correlation: point " + std::to_string(i) +
                           " has no predictive variance");
    }
    sd[i] = std::sqrt(cov(i, i));
  }
  Matrix corr(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    corr(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double c = std::clamp(cov(i, j) / (sd[i] * sd[j]), -1.0, 1.0);
      corr(i, j) = c;
      corr(j, i) = c;
    }
  }
  return corr;
}

EiDistribution ei_posterior_distribution(const GpModel& model, const Matrix& batch,
                                         double reference_best, int draws, std::uint64_t seed) {
  if (!std::isfinite(reference_best)) {
    throw NonFiniteValue("ei_posterior_distribution: reference value must be finite");
  }
  if (draws < 2) {
    throw InvalidParameter("ei_posterior_distribution: at least 2 draws are required");
  }
  const Matrix samples = model.posterior_sample(batch, draws, seed);

  EiDistribution out;
  out.samples.resize(draws);
  for (Eigen::Index k = 0; k < samples.rows(); ++k) {
    out.samples[k] = samples.row(k).maxCoeff() - reference_best;
  }
  double best_mean = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < batch.rows(); ++j) {
    best_mean = std::max(best_mean, model.predict(batch.row(j).transpose()).mean);
  }
  out.a_posteriori = best_mean - reference_best;
  return out;
}

double LinearFit::rmse(const Vector& y) const {
  if (y.size() != fitted.size()) {
    throw DimensionMismatch("LinearFit::rmse: response length mismatch");
  }
  return std::sqrt((y - fitted).squaredNorm() / static_cast<double>(y.size()));
}

LinearFit fit_linear_baseline(const Matrix& x, const Vector& y) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (y.size() != n) {
    throw DimensionMismatch("fit_linear_baseline: " + std::to_string(n) + " inputs but " +
                            std::to_string(y.size()) + " responses");
  }
  if (n < d + 1) {
    throw InsufficientPoints("fit_linear_baseline: need at least d + 1 = " +
                             std::to_string(d + 1) + " points, got " + std::to_string(n));
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw NonFiniteValue("fit_linear_baseline: inputs contain a non-finite value");
  }

  Matrix design(n, d + 1);
  design.col(0).setOnes();
  design.rightCols(d) = x;

  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  if (qr.rank() < d + 1) {
    throw RankDeficient("fit_linear_baseline: design matrix is rank deficient (rank " +
                        std::to_string(qr.rank()) + " of " + std::to_string(d + 1) + ")");
  }

  LinearFit fit;
  fit.coefficients = qr.solve(y);
  fit.fitted = design * fit.coefficients;
  return fit;
}

}  // namespace krigopt
