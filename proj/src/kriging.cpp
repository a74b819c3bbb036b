#include "krigopt/kriging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "krigopt/optim.hpp"

namespace krigopt {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Exact-duplicate tolerance on normalized coordinates.
constexpr double kDuplicateTol = 1e-12;

void check_training(const TrainingSet& training, const Trend& trend) {
  if (training.x.rows() != training.y.size()) {
    throw DimensionMismatch("training set has " + std::to_string(training.x.rows()) +
                            " inputs but " + std::to_string(training.y.size()) + " responses");
  }
  const int min_n = trend.kind == Trend::Kind::estimate_constant ? 2 : 1;
  if (training.size() < min_n) {
    throw InsufficientPoints("training set needs at least " + std::to_string(min_n) +
                             " points for this trend, got " + std::to_string(training.size()));
  }
  if (training.dimension() < 1) {
    throw DimensionMismatch("training inputs must have at least one dimension");
  }
  if (!training.x.allFinite() || !training.y.allFinite()) {
    throw NonFiniteValue("training set contains a non-finite value");
  }
  if (trend.kind == Trend::Kind::known_mean && !std::isfinite(trend.mean)) {
    throw NonFiniteValue("known trend mean must be finite");
  }
}

void check_duplicates(const Matrix& x_normalized) {
  for (Eigen::Index i = 0; i < x_normalized.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < x_normalized.rows(); ++j) {
      if ((x_normalized.row(i) - x_normalized.row(j)).cwiseAbs().maxCoeff() <= kDuplicateTol) {
        throw DuplicatePoints("training inputs " + std::to_string(i) + " and " +
                              std::to_string(j) + " coincide");
      }
    }
  }
}

Normalizer make_normalizer(const TrainingSet& training, const std::optional<BoxDomain>& domain) {
  if (domain.has_value()) {
    domain->validate();
    if (domain->dimension() != training.dimension()) {
      throw DimensionMismatch("domain dimension " + std::to_string(domain->dimension()) +
                              " != training dimension " + std::to_string(training.dimension()));
    }
    return Normalizer::from_domain(*domain);
  }
  return Normalizer::from_points(training.x);
}

struct FactoredCorrelation {
  CholeskyFactor factor;
  double nugget;
};

// Applies the escalating-jitter policy to the unit-diagonal correlation
// matrix.
FactoredCorrelation factor_correlation(const Matrix& correlation) {
  double nugget = kNuggetInitial;
  while (true) {
    Matrix m = correlation;
    m.diagonal().array() += nugget;
    try {
      return FactoredCorrelation{cholesky(m), nugget};
    } catch (const NotPositiveDefinite&) {
      if (nugget >= kNuggetCap) {
        throw DegenerateDesign(
            "correlation matrix stayed indefinite at the maximum jitter 1e-4; "
            "the design is too close to singular");
      }
      nugget *= kNuggetGrowth;
    }
  }
}

struct TrendFit {
  double mu;
  Vector alpha;   // (C + nugget I)^-1 (y - mu 1)
  double sigma2;  // profiled process variance
};

TrendFit profile_trend(const CholeskyFactor& factor, const Vector& y, const Trend& trend) {
  const Eigen::Index n = y.size();
  TrendFit out;
  if (trend.kind == Trend::Kind::known_mean) {
    out.mu = trend.mean;
  } else {
    const Vector ones = Vector::Ones(n);
    const Vector u = factor.solve(ones);
    out.mu = u.dot(y) / u.sum();
  }
  const Vector resid = (y.array() - out.mu).matrix();
  out.alpha = factor.solve(resid);
  out.sigma2 = resid.dot(out.alpha) / static_cast<double>(n);
  return out;
}

double profiled_nll_value(const CholeskyFactor& factor, const Vector& y, const Trend& trend) {
  const TrendFit t = profile_trend(factor, y, trend);
  if (!(t.sigma2 > 0.0) || !std::isfinite(t.sigma2)) {
    return std::numeric_limits<double>::infinity();
  }
  const double n = static_cast<double>(y.size());
  return 0.5 * (n * std::log(2.0 * kPi * t.sigma2) + factor.log_det() + n);
}

// Profiled NLL at given lengthscales on pre-normalized inputs; +infinity when
// the correlation matrix cannot be factored even at the jitter cap.
double profiled_nll(const Matrix& x_normalized, const Vector& y, KernelFamily family,
                    const Vector& lengthscales, const Trend& trend) {
  KernelSpec unit;
  unit.family = family;
  unit.lengthscales = lengthscales;
  unit.process_variance = 1.0;
  const Matrix correlation = covariance_matrix(unit, x_normalized);
  try {
    const FactoredCorrelation fc = factor_correlation(correlation);
    return profiled_nll_value(fc.factor, y, trend);
  } catch (const DegenerateDesign&) {
    return std::numeric_limits<double>::infinity();
  }
}

double population_variance(const Vector& y) {
  const double mean = y.mean();
  return (y.array() - mean).square().sum() / static_cast<double>(y.size());
}

}  // namespace

double PredictiveDistribution::sd() const {
  return std::sqrt(std::max(0.0, variance));
}

Normalizer::Normalizer(Vector offset, Vector scale)
    : offset_(std::move(offset)), scale_(std::move(scale)) {
  if (offset_.size() == 0 || offset_.size() != scale_.size()) {
    throw InvalidParameter("Normalizer: offset and scale must be non-empty and equally sized");
  }
  for (Eigen::Index j = 0; j < scale_.size(); ++j) {
    if (!std::isfinite(offset_[j]) || !std::isfinite(scale_[j]) || scale_[j] <= 0.0) {
      throw InvalidParameter("Normalizer: scale must be finite and positive in dimension " +
                             std::to_string(j));
    }
  }
}

Normalizer Normalizer::from_domain(const BoxDomain& domain) {
  domain.validate();
  return Normalizer(domain.lower, domain.width());
}

Normalizer Normalizer::from_points(const Matrix& x) {
  if (x.rows() == 0 || x.cols() == 0) {
    throw InvalidParameter("Normalizer::from_points: empty point set");
  }
  Vector offset = x.colwise().minCoeff().transpose();
  Vector scale = x.colwise().maxCoeff().transpose() - offset;
  for (Eigen::Index j = 0; j < scale.size(); ++j) {
    if (scale[j] <= 0.0) {
      scale[j] = 1.0;
    }
  }
  return Normalizer(std::move(offset), std::move(scale));
}

Vector Normalizer::apply(const Vector& x) const {
  if (x.size() != offset_.size()) {
    throw DimensionMismatch("Normalizer: point dimension " + std::to_string(x.size()) +
                            " != expected " + std::to_string(offset_.size()));
  }
  return (x - offset_).cwiseQuotient(scale_);
}

Matrix Normalizer::apply(const Matrix& x) const {
  if (x.cols() != offset_.size()) {
    throw DimensionMismatch("Normalizer: points have dimension " + std::to_string(x.cols()) +
                            " != expected " + std::to_string(offset_.size()));
  }
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    out.col(j) = (x.col(j).array() - offset_[j]) / scale_[j];
  }
  return out;
}

GpModel GpModel::build(TrainingSet training, KernelSpec spec, Trend trend, Normalizer normalizer,
                       std::optional<BoxDomain> domain) {
  check_training(training, trend);
  spec.validate();
  if (spec.dimension() != training.dimension()) {
    throw DimensionMismatch("kernel dimension " + std::to_string(spec.dimension()) +
                            " != training dimension " + std::to_string(training.dimension()));
  }

  Matrix x_normalized = normalizer.apply(training.x);
  check_duplicates(x_normalized);

  KernelSpec unit = spec;
  unit.process_variance = 1.0;
  FactoredCorrelation fc = factor_correlation(covariance_matrix(unit, x_normalized));
  const TrendFit t = profile_trend(fc.factor, training.y, trend);

  GpModel model;
  model.training_ = std::move(training);
  model.x_normalized_ = std::move(x_normalized);
  model.spec_ = std::move(spec);
  model.trend_ = trend;
  model.mu_ = t.mu;
  model.nugget_ = fc.nugget;
  model.factor_ = std::move(fc.factor);
  model.alpha_corr_ = t.alpha;
  model.normalizer_ = std::move(normalizer);
  model.domain_ = std::move(domain);
  return model;
}

GpModel fit(const TrainingSet& training, const KernelSpec& spec, const Trend& trend,
            const std::optional<BoxDomain>& domain) {
  check_training(training, trend);
  return GpModel::build(training, spec, trend, make_normalizer(training, domain), domain);
}

GpModel refit_with(const GpModel& base, const TrainingSet& training) {
  return GpModel::build(training, base.spec(), base.trend(), base.normalizer(), base.domain());
}

Vector GpModel::weights() const {
  return alpha_corr_ / spec_.process_variance;
}

Vector GpModel::normalize_point(const Vector& x0, const char* what) const {
  if (x0.size() != training_.dimension()) {
    throw DimensionMismatch(std::string(what) + ": point dimension " + std::to_string(x0.size()) +
                            " != model dimension " + std::to_string(training_.dimension()));
  }
  if (!x0.allFinite()) {
    throw NonFiniteValue(std::string(what) + ": point contains a non-finite coordinate");
  }
  return normalizer_.apply(x0);
}

// Correlation of a (normalized) prediction point with the training inputs.
// The nugget rides along wherever the point coincides with a training input,
// so the model reproduces observed responses exactly with zero variance
// instead of leaking jitter-scale error.
Vector GpModel::correlation_to(const Vector& xn) const {
  KernelSpec unit = spec_;
  unit.process_variance = 1.0;
  Vector r = covariance_vector(unit, x_normalized_, xn);
  for (Eigen::Index i = 0; i < x_normalized_.rows(); ++i) {
    if ((x_normalized_.row(i).transpose() - xn).cwiseAbs().maxCoeff() <= kDuplicateTol) {
      r[i] += nugget_;
    }
  }
  return r;
}

PredictiveDistribution GpModel::predict(const Vector& x0) const {
  const Vector xn = normalize_point(x0, "predict");
  const Vector r = correlation_to(xn);
  PredictiveDistribution out;
  out.mean = mu_ + r.dot(alpha_corr_);
  const Vector s = factor_.solve_lower(r);
  out.variance =
      spec_.process_variance * std::max(0.0, (1.0 + nugget_) - s.squaredNorm());
  return out;
}

LooVectors GpModel::leave_one_out() const {
  const int n = training_.size();
  if (n < 2) {
    throw InsufficientPoints("leave_one_out: at least 2 training points required");
  }
  // Precision of the jittered correlation matrix; all leave-one-out
  // quantities fall out of its diagonal (Dubrule's closed forms).
  const Matrix eye = Matrix::Identity(n, n);
  const Matrix precision = factor_.solve(eye);
  const Vector pdiag = precision.diagonal();

  Vector q(n);
  if (trend_.kind == Trend::Kind::known_mean) {
    q = pdiag;
  } else {
    // Removing a point also moves the estimated constant; the effective
    // residual precision is the Schur complement against the trend column.
    const Vector u = precision * Vector::Ones(n);
    const double total = u.sum();
    q = pdiag - u.cwiseAbs2() / total;
  }

  LooVectors out;
  out.mean.resize(n);
  out.sd.resize(n);
  for (int i = 0; i < n; ++i) {
    if (!(q[i] > 0.0) || !(pdiag[i] > 0.0)) {
      throw NotPositiveDefinite("leave_one_out: ill-conditioned precision at point " +
                                std::to_string(i));
    }
    out.mean[i] = training_.y[i] - alpha_corr_[i] / q[i];
    out.sd[i] = std::sqrt(spec_.process_variance / pdiag[i]);
  }
  return out;
}

Matrix GpModel::posterior_cov(const Matrix& x_new) const {
  if (x_new.rows() < 1) {
    throw InvalidParameter("posterior_cov: at least one prediction point required");
  }
  if (x_new.cols() != training_.dimension()) {
    throw DimensionMismatch("posterior_cov: points have dimension " + std::to_string(x_new.cols()) +
                            " != model dimension " + std::to_string(training_.dimension()));
  }
  if (!x_new.allFinite()) {
    throw NonFiniteValue("posterior_cov: points contain a non-finite coordinate");
  }
  const Eigen::Index m = x_new.rows();
  const Matrix xn = normalizer_.apply(x_new);
  KernelSpec unit = spec_;
  unit.process_variance = 1.0;

  Matrix cross(training_.size(), m);
  for (Eigen::Index k = 0; k < m; ++k) {
    cross.col(k) = correlation_to(xn.row(k).transpose());
  }
  // Prior block with the nugget on every coincident pair, diagonal included,
  // mirroring the cross-covariance convention.
  Matrix prior = covariance_matrix(unit, xn);
  prior.diagonal().array() += nugget_;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if ((xn.row(i) - xn.row(j)).cwiseAbs().maxCoeff() <= kDuplicateTol) {
        prior(i, j) += nugget_;
        prior(j, i) += nugget_;
      }
    }
  }

  const Matrix s = factor_.solve_lower(cross);
  Matrix v = spec_.process_variance * (prior - s.transpose() * s);
  v = 0.5 * (v + v.transpose()).eval();
  return v;
}

Matrix GpModel::posterior_sample(const Matrix& x_new, int draws, std::uint64_t seed) const {
  if (draws < 1) {
    throw InvalidParameter("posterior_sample: draws must be positive");
  }
  const Eigen::Index m = x_new.rows();
  const Matrix cov = posterior_cov(x_new);

  const Matrix xn = normalizer_.apply(x_new);
  Vector mean(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    mean[k] = mu_ + correlation_to(xn.row(k).transpose()).dot(alpha_corr_);
  }

  // The posterior covariance is only positive semi-definite (and rounding can
  // nudge it slightly indefinite), so escalate a small diagonal jitter until
  // it factors.
  const double unit_jitter = spec_.process_variance;
  std::optional<CholeskyFactor> factor;
  for (double jitter : {0.0, 1e-12, 1e-10, 1e-8, 1e-6}) {
    Matrix attempt = cov;
    attempt.diagonal().array() += jitter * unit_jitter;
    try {
      factor.emplace(cholesky(attempt));
      break;
    } catch (const NotPositiveDefinite&) {
      continue;
    }
  }
  if (!factor.has_value()) {
    throw NotPositiveDefinite("posterior_sample: covariance could not be factored");
  }

  RngStream stream(seed);
  Matrix out(draws, m);
  Vector z(m);
  for (int rep = 0; rep < draws; ++rep) {
    for (Eigen::Index k = 0; k < m; ++k) {
      z[k] = stream.normal();
    }
    out.row(rep) = (mean + factor->lower() * z).transpose();
  }
  return out;
}

double neg_log_likelihood(const TrainingSet& training, const KernelSpec& spec, const Trend& trend,
                          const std::optional<BoxDomain>& domain) {
  check_training(training, trend);
  spec.validate();
  if (spec.dimension() != training.dimension()) {
    throw DimensionMismatch("neg_log_likelihood: kernel dimension " +
                            std::to_string(spec.dimension()) + " != training dimension " +
                            std::to_string(training.dimension()));
  }
  const Normalizer normalizer = make_normalizer(training, domain);
  const Matrix xn = normalizer.apply(training.x);
  check_duplicates(xn);
  const double value = profiled_nll(xn, training.y, spec.family, spec.lengthscales, trend);
  if (!std::isfinite(value)) {
    throw DegenerateDesign("neg_log_likelihood: profiled variance is zero or the correlation "
                           "matrix is numerically singular");
  }
  return value;
}

KernelSpec estimate_params(const TrainingSet& training, KernelFamily family, const Trend& trend,
                           std::uint64_t seed, const std::optional<BoxDomain>& domain,
                           const MleOptions& options) {
  check_training(training, trend);
  if (training.size() < 2) {
    throw InsufficientPoints("estimate_params: at least 2 training points required");
  }
  if (options.starts < 1) {
    throw InvalidParameter("estimate_params: starts must be positive");
  }
  if (options.evals_per_start < 0) {
    throw InvalidParameter("estimate_params: evals_per_start must be non-negative");
  }

  const double var_y = population_variance(training.y);
  const double y_scale = std::max(1.0, training.y.cwiseAbs().maxCoeff());
  if (var_y <= 1e-24 * y_scale * y_scale) {
    throw DegenerateDesign("estimate_params: response is constant; "
                           "no variance structure to estimate");
  }

  const Normalizer normalizer = make_normalizer(training, domain);
  const Matrix xn = normalizer.apply(training.x);
  check_duplicates(xn);

  const int d = training.dimension();
  BoxDomain log_box;
  log_box.lower = Vector::Constant(d, std::log(kThetaLower));
  log_box.upper = Vector::Constant(d, std::log(kThetaUpper));

  const auto objective = [&](const Vector& log_theta) {
    return profiled_nll(xn, training.y, family, log_theta.array().exp().matrix(), trend);
  };

  NelderMeadOptions nm;
  nm.max_evals = options.evals_per_start > 0 ? options.evals_per_start : 200 * d;
  nm.initial_step = 0.05;

  const DesignMatrix starts = lhs(options.starts, log_box, seed);
  double best_value = std::numeric_limits<double>::infinity();
  Vector best_log_theta = Vector::Zero(d);
  for (int s = 0; s < starts.size(); ++s) {
    const NelderMeadResult run =
        nelder_mead_box(objective, starts.points.row(s).transpose(), log_box, nm);
    if (run.value < best_value) {
      best_value = run.value;
      best_log_theta = run.x;
    }
  }
  if (!std::isfinite(best_value)) {
    throw DegenerateDesign("estimate_params: likelihood was non-finite at every probe");
  }

  KernelSpec unit;
  unit.family = family;
  unit.lengthscales = best_log_theta.array().exp().matrix();
  unit.process_variance = 1.0;
  const FactoredCorrelation fc = factor_correlation(covariance_matrix(unit, xn));
  const TrendFit t = profile_trend(fc.factor, training.y, trend);
  if (!(t.sigma2 > 0.0) || !std::isfinite(t.sigma2)) {
    throw DegenerateDesign("estimate_params: profiled process variance is not positive");
  }

  KernelSpec out = unit;
  out.process_variance = t.sigma2;
  return out;
}

}  // namespace krigopt
