#pragma once

#include <cstdint>
#include <optional>

#include "krigopt/design.hpp"
#include "krigopt/kernel.hpp"
#include "krigopt/numerics.hpp"

namespace krigopt {

// Observed data: one input per row of x, matching response in y.
struct TrainingSet {
  Matrix x;  // N x d
  Vector y;  // N

  int size() const { return static_cast<int>(x.rows()); }
  int dimension() const { return static_cast<int>(x.cols()); }
};

// Trend model for the Gaussian process mean: either a caller-supplied
// constant (simple kriging) or a constant estimated from the data by
// generalized least squares (ordinary kriging).
struct Trend {
  enum class Kind { known_mean, estimate_constant };

  Kind kind = Kind::estimate_constant;
  double mean = 0.0;  // only read when kind == known_mean

  static Trend known(double mean) { return Trend{Kind::known_mean, mean}; }
  static Trend estimate() { return Trend{Kind::estimate_constant, 0.0}; }
};

struct PredictiveDistribution {
  double mean = 0.0;
  double variance = 0.0;

  double sd() const;
};

// Per-dimension affine map onto the unit cube.  Lengthscales are always
// expressed in these normalized units so their search bounds are
// scale-free.
class Normalizer {
 public:
  Normalizer() = default;
  Normalizer(Vector offset, Vector scale);

  static Normalizer from_domain(const BoxDomain& domain);
  // Uses the per-column bounding box of the rows; a column with zero range
  // gets unit scale so the map stays invertible.
  static Normalizer from_points(const Matrix& x);

  int dimension() const { return static_cast<int>(offset_.size()); }
  const Vector& offset() const { return offset_; }
  const Vector& scale() const { return scale_; }

  Vector apply(const Vector& x) const;
  Matrix apply(const Matrix& x) const;

 private:
  Vector offset_;
  Vector scale_;
};

struct LooVectors {
  Vector mean;  // leave-one-out predictive mean at each training input
  Vector sd;    // matching predictive standard deviation
};

struct MleOptions {
  int starts = 10;          // multistart count
  int evals_per_start = 0;  // likelihood evaluations per start; 0 = 200 * d
};

// Fitted Gaussian-process interpolator.  Construction happens through fit();
// the object owns everything needed for O(N) mean and O(N^2) variance
// predictions.
class GpModel {
 public:
  const TrainingSet& training() const { return training_; }
  const KernelSpec& spec() const { return spec_; }
  const Trend& trend() const { return trend_; }
  double trend_mean() const { return mu_; }       // fitted constant mean
  double nugget() const { return nugget_; }       // relative jitter applied
  const Normalizer& normalizer() const { return normalizer_; }
  const std::optional<BoxDomain>& domain() const { return domain_; }

  // Kriging weights alpha = K^-1 (y - mu 1): the predictive mean equals
  // mu + k(x0, X) . alpha.
  Vector weights() const;

  // Predictive mean and variance at a single point.  The variance is
  // non-negative by construction.
  PredictiveDistribution predict(const Vector& x0) const;

  // Leave-one-out predictive mean and standard deviation at every training
  // input, computed in closed form from the single fitted factorization (no
  // refits), with hyperparameters, nugget, and trend treatment held fixed.
  LooVectors leave_one_out() const;

  // m x m predictive covariance across the rows of x_new.
  Matrix posterior_cov(const Matrix& x_new) const;

  // draws x m matrix of joint posterior samples at the rows of x_new.
  // Deterministic in seed.
  Matrix posterior_sample(const Matrix& x_new, int draws, std::uint64_t seed) const;

 private:
  friend GpModel fit(const TrainingSet&, const KernelSpec&, const Trend&,
                     const std::optional<BoxDomain>&);
  friend GpModel refit_with(const GpModel&, const TrainingSet&);

  GpModel() = default;

  static GpModel build(TrainingSet training, KernelSpec spec, Trend trend, Normalizer normalizer,
                       std::optional<BoxDomain> domain);

  TrainingSet training_;
  Matrix x_normalized_;
  KernelSpec spec_;  // lengthscales in normalized units
  Trend trend_;
  double mu_ = 0.0;
  double nugget_ = 0.0;
  CholeskyFactor factor_{Matrix::Identity(1, 1)};  // of C + nugget I
  Vector alpha_corr_;  // (C + nugget I)^-1 (y - mu 1)
  Normalizer normalizer_;
  std::optional<BoxDomain> domain_;

  Vector normalize_point(const Vector& x0, const char* what) const;
  Vector correlation_to(const Vector& xn) const;
};

// Fits the interpolator at fixed hyperparameters.  Inputs are normalized via
// `domain` when given, else via the training bounding box.  A diagonal
// jitter (nugget) starting at 1e-8 and escalated tenfold up to 1e-4 keeps
// the correlation matrix factorable; designs that defeat the cap raise
// DegenerateDesign, and exactly duplicated inputs raise DuplicatePoints.
GpModel fit(const TrainingSet& training, const KernelSpec& spec, const Trend& trend,
            const std::optional<BoxDomain>& domain = std::nullopt);

// Refits weights, trend constant, and factorization for an augmented or
// otherwise modified training set while reusing `base`'s hyperparameters and
// input normalization (so lengthscales keep their meaning even when the new
// points change the bounding box).
GpModel refit_with(const GpModel& base, const TrainingSet& training);

// Concentrated (profiled) negative log likelihood of the correlation
// hyperparameters: the constant mean (when estimated) and the process
// variance are profiled out analytically, so spec.process_variance does not
// influence the value.  Uses the same nugget policy as fit().
double neg_log_likelihood(const TrainingSet& training, const KernelSpec& spec,
                          const Trend& trend,
                          const std::optional<BoxDomain>& domain = std::nullopt);

// Maximum-likelihood lengthscales and process variance via multistart
// Nelder-Mead on the profiled likelihood in log-lengthscale space, searched
// over [1e-3, 10]^d in normalized units.  Deterministic in seed.  A constant
// response (zero sample variance) raises DegenerateDesign.
KernelSpec estimate_params(const TrainingSet& training, KernelFamily family, const Trend& trend,
                           std::uint64_t seed,
                           const std::optional<BoxDomain>& domain = std::nullopt,
                           const MleOptions& options = MleOptions{});

// Lengthscale search bounds used by estimate_params, in normalized units.
inline constexpr double kThetaLower = 1e-3;
inline constexpr double kThetaUpper = 10.0;

// Nugget escalation ladder used by fit(): initial relative jitter, growth
// factor, and cap.
inline constexpr double kNuggetInitial = 1e-8;
inline constexpr double kNuggetGrowth = 10.0;
inline constexpr double kNuggetCap = 1e-4;

}  // namespace krigopt
