#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <krigopt/design.hpp>
#include <krigopt/errors.hpp>
#include <krigopt/kernel.hpp>
#include <krigopt/kriging.hpp>
#include <krigopt/numerics.hpp>

#include <cmath>
#include <optional>

using namespace krigopt;

namespace {

KernelSpec make_spec(int dim, double theta, double sigma2 = 1.0,
                     KernelFamily family = KernelFamily::matern52) {
  KernelSpec s;
  s.family = family;
  s.lengthscales = Vector::Constant(dim, theta);
  s.process_variance = sigma2;
  return s;
}

TrainingSet three_point_line() {
  TrainingSet t;
  t.x = Matrix(3, 1);
  t.x << 0.0, 0.5, 1.0;
  t.y = Vector(3);
  t.y << 0.0, 1.0, 0.0;
  return t;
}

BoxDomain unit_interval() { return BoxDomain::unit_cube(1); }

// Draws a smooth response from the prior so hyperparameter recovery has
// something real to find.
TrainingSet gp_draw(int n, double theta, std::uint64_t seed) {
  BoxDomain d = unit_interval();
  DesignMatrix des = lhs(n, d, seed);
  KernelSpec s = make_spec(1, theta);
  Matrix k = covariance_matrix(s, des.points);
  k.diagonal().array() += 1e-10;
  CholeskyFactor f = cholesky(k);
  RngStream rng(derive_seed(seed, 17));
  Vector z(n);
  for (int i = 0; i < n; ++i) z[i] = rng.normal();
  TrainingSet t;
  t.x = des.points;
  t.y = f.lower() * z;
  return t;
}

}  // namespace

TEST_CASE("fit interpolates the training data") {
  TrainingSet t = three_point_line();
  GpModel m = fit(t, make_spec(1, 0.5), Trend::estimate(), unit_interval());
  for (int i = 0; i < t.size(); ++i) {
    PredictiveDistribution p = m.predict(t.x.row(i).transpose());
    CHECK(p.mean == doctest::Approx(t.y[i]).epsilon(1e-6));
    CHECK(p.variance >= 0.0);
    CHECK(p.variance < 1e-6);
  }
  CHECK(m.nugget() == kNuggetInitial);  // clean design never escalates
}

TEST_CASE("simple kriging with one point matches the closed form") {
  TrainingSet t;
  t.x = Matrix(1, 1);
  t.x << 0.0;
  t.y = Vector(1);
  t.y << 2.0;
  BoxDomain d = unit_interval();
  GpModel m = fit(t, make_spec(1, 1.0), Trend::known(0.0), d);

  Vector at0(1), at1(1);
  at0 << 0.0;
  at1 << 1.0;
  PredictiveDistribution p0 = m.predict(at0);
  CHECK(p0.mean == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(p0.variance < 1e-6);

  const double rho = correlation_1d(KernelFamily::matern52, 1.0, 1.0);
  PredictiveDistribution p1 = m.predict(at1);
  CHECK(p1.mean == doctest::Approx(rho * 2.0).epsilon(1e-6));
  CHECK(p1.variance == doctest::Approx(1.0 - rho * rho).epsilon(1e-5));
  CHECK(p1.sd() == doctest::Approx(std::sqrt(p1.variance)).epsilon(1e-14));
}

TEST_CASE("the estimated constant trend reproduces a constant response") {
  TrainingSet t;
  t.x = Matrix(4, 1);
  t.x << 0.0, 0.3, 0.6, 1.0;
  t.y = Vector::Constant(4, 3.25);
  GpModel m = fit(t, make_spec(1, 0.7), Trend::estimate(), unit_interval());
  CHECK(m.trend_mean() == doctest::Approx(3.25).epsilon(1e-12));
  Vector far(1);
  far << 0.45;
  CHECK(m.predict(far).mean == doctest::Approx(3.25).epsilon(1e-9));
}

TEST_CASE("predictions are equivariant under response translation") {
  TrainingSet t = gp_draw(12, 0.4, 5u);
  TrainingSet shifted = t;
  shifted.y.array() += 10.0;
  GpModel a = fit(t, make_spec(1, 0.4), Trend::estimate(), unit_interval());
  GpModel b = fit(shifted, make_spec(1, 0.4), Trend::estimate(), unit_interval());
  for (double q : {0.11, 0.47, 0.83}) {
    Vector x0(1);
    x0 << q;
    PredictiveDistribution pa = a.predict(x0);
    PredictiveDistribution pb = b.predict(x0);
    CHECK(pb.mean - pa.mean == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(pb.variance == doctest::Approx(pa.variance).epsilon(1e-9));
  }
}

TEST_CASE("far from all data the prediction reverts to the trend") {
  TrainingSet t = three_point_line();
  BoxDomain wide;
  wide.lower = Vector::Constant(1, 0.0);
  wide.upper = Vector::Constant(1, 100.0);
  GpModel m = fit(t, make_spec(1, 0.02), Trend::estimate(), wide);  // theta in normalized units
  Vector far(1);
  far << 90.0;
  PredictiveDistribution p = m.predict(far);
  CHECK(p.mean == doctest::Approx(m.trend_mean()).epsilon(1e-9));
  CHECK(p.variance == doctest::Approx(m.spec().process_variance).epsilon(1e-6));
}

TEST_CASE("weights reproduce the predictive mean") {
  TrainingSet t = gp_draw(10, 0.5, 9u);
  BoxDomain d = unit_interval();
  GpModel m = fit(t, make_spec(1, 0.5, 2.0), Trend::estimate(), d);
  Vector w = m.weights();
  REQUIRE(w.size() == t.size());
  Matrix xn = m.normalizer().apply(t.x);
  for (double q : {0.2, 0.55, 0.9}) {
    Vector x0(1);
    x0 << q;
    Vector r = covariance_vector(m.spec(), xn, m.normalizer().apply(x0));
    const double mean = m.trend_mean() + r.dot(w);
    CHECK(mean == doctest::Approx(m.predict(x0).mean).epsilon(1e-10));
  }
}

TEST_CASE("profiled negative log likelihood matches the frozen reference") {
  TrainingSet t = three_point_line();
  const double nll_est =
      neg_log_likelihood(t, make_spec(1, 0.5), Trend::estimate(), unit_interval());
  CHECK(nll_est == doctest::Approx(3.2470650483434769).epsilon(1e-10));
  const double nll_known =
      neg_log_likelihood(t, make_spec(1, 0.5), Trend::known(0.0), unit_interval());
  CHECK(nll_known == doctest::Approx(3.2574881988204485).epsilon(1e-10));
  // the profile makes the reported value independent of spec.process_variance
  const double nll_scaled =
      neg_log_likelihood(t, make_spec(1, 0.5, 7.3), Trend::estimate(), unit_interval());
  CHECK(nll_scaled == doctest::Approx(nll_est).epsilon(1e-13));
}

TEST_CASE("scaling the response shifts the likelihood by N log |c|") {
  TrainingSet t = gp_draw(15, 0.3, 21u);
  TrainingSet scaled = t;
  const double c = 3.0;
  scaled.y *= c;
  const double base = neg_log_likelihood(t, make_spec(1, 0.3), Trend::estimate(), unit_interval());
  const double after =
      neg_log_likelihood(scaled, make_spec(1, 0.3), Trend::estimate(), unit_interval());
  CHECK(after - base == doctest::Approx(15.0 * std::log(c)).epsilon(1e-9));
}

TEST_CASE("leave_one_out matches refitting without each point") {
  for (int dim : {1, 2}) {
    BoxDomain d = BoxDomain::unit_cube(dim);
    DesignMatrix des = lhs(12, d, 33u + static_cast<std::uint64_t>(dim));
    TrainingSet t;
    t.x = des.points;
    t.y = Vector(12);
    for (int i = 0; i < 12; ++i) {
      t.y[i] = std::sin(3.0 * t.x(i, 0)) + (dim > 1 ? 0.5 * t.x(i, 1) * t.x(i, 1) : 0.0);
    }
    for (Trend trend : {Trend::estimate(), Trend::known(0.2)}) {
      KernelSpec s = make_spec(dim, 0.6, 1.7);
      GpModel m = fit(t, s, trend, d);
      LooVectors loo = m.leave_one_out();
      REQUIRE(loo.mean.size() == 12);
      REQUIRE(loo.sd.size() == 12);
      for (int i = 0; i < 12; ++i) {
        TrainingSet rest;
        rest.x = Matrix(11, dim);
        rest.y = Vector(11);
        int k = 0;
        for (int j = 0; j < 12; ++j) {
          if (j == i) continue;
          rest.x.row(k) = t.x.row(j);
          rest.y[k] = t.y[j];
          ++k;
        }
        GpModel sub = fit(rest, s, trend, d);
        PredictiveDistribution p = sub.predict(t.x.row(i).transpose());
        CHECK(loo.mean[i] == doctest::Approx(p.mean).epsilon(5e-7));
        CHECK(loo.sd[i] > 0.0);
      }
    }
  }
}

TEST_CASE("leave_one_out closed form matches the frozen three-point reference") {
  TrainingSet t = three_point_line();
  GpModel m = fit(t, make_spec(1, 0.5), Trend::estimate(), unit_interval());
  LooVectors loo = m.leave_one_out();
  CHECK(loo.mean[0] == doctest::Approx(0.904757471228463).epsilon(1e-9));
  CHECK(loo.mean[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(loo.mean[2] == doctest::Approx(0.904757471228463).epsilon(1e-9));
}

TEST_CASE("estimate_params recovers a known lengthscale and is deterministic") {
  TrainingSet t = gp_draw(40, 0.3, 2024u);
  KernelSpec a = estimate_params(t, KernelFamily::matern52, Trend::estimate(), 1u, unit_interval());
  KernelSpec b = estimate_params(t, KernelFamily::matern52, Trend::estimate(), 1u, unit_interval());
  CHECK(a.lengthscales[0] == b.lengthscales[0]);
  CHECK(a.process_variance == b.process_variance);
  CHECK(a.lengthscales[0] > 0.3 / 3.0);
  CHECK(a.lengthscales[0] < 0.3 * 3.0);
  CHECK(a.process_variance > 0.0);
  CHECK(a.lengthscales[0] >= kThetaLower);
  CHECK(a.lengthscales[0] <= kThetaUpper);

  // the optimum beats a grid of probes under the same likelihood
  const double at_opt = neg_log_likelihood(t, a, Trend::estimate(), unit_interval());
  for (double theta : {0.05, 0.15, 0.6, 1.5, 5.0}) {
    CHECK(at_opt <= neg_log_likelihood(t, make_spec(1, theta), Trend::estimate(), unit_interval()) +
                        1e-9);
  }
}

TEST_CASE("estimate_params rejects a constant response") {
  TrainingSet t;
  t.x = Matrix(5, 1);
  t.x << 0.0, 0.2, 0.4, 0.6, 0.8;
  t.y = Vector::Constant(5, 1.0);
  CHECK_THROWS_AS(
      estimate_params(t, KernelFamily::matern52, Trend::estimate(), 1u, unit_interval()),
      DegenerateDesign);
}

TEST_CASE("posterior_cov diagonal agrees with predict variance") {
  TrainingSet t = gp_draw(9, 0.5, 77u);
  GpModel m = fit(t, make_spec(1, 0.5, 1.4), Trend::estimate(), unit_interval());
  Matrix xnew(3, 1);
  xnew << 0.15, 0.5, 0.92;
  Matrix cov = m.posterior_cov(xnew);
  REQUIRE(cov.rows() == 3);
  REQUIRE(cov.cols() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(cov(i, i) == doctest::Approx(m.predict(xnew.row(i).transpose()).variance)
                           .epsilon(1e-9)
                           .scale(1.0));
    for (int j = 0; j < 3; ++j) {
      CHECK(cov(i, j) == doctest::Approx(cov(j, i)).epsilon(1e-12).scale(1.0));
    }
  }
  // nearby points are strongly positively correlated
  Matrix close(2, 1);
  close << 0.40, 0.41;
  Matrix cc = m.posterior_cov(close);
  CHECK(cc(0, 1) > 0.9 * std::sqrt(cc(0, 0) * cc(1, 1)));
}

TEST_CASE("posterior_sample is deterministic and matches the analytic moments") {
  TrainingSet t = gp_draw(8, 0.4, 3u);
  GpModel m = fit(t, make_spec(1, 0.4, 1.2), Trend::estimate(), unit_interval());
  Matrix xnew(2, 1);
  xnew << 0.25, 0.7;

  Matrix s1 = m.posterior_sample(xnew, 200, 42u);
  Matrix s2 = m.posterior_sample(xnew, 200, 42u);
  CHECK((s1 - s2).cwiseAbs().maxCoeff() == 0.0);
  Matrix s3 = m.posterior_sample(xnew, 200, 43u);
  CHECK((s1 - s3).cwiseAbs().maxCoeff() > 0.0);
  REQUIRE(s1.rows() == 200);
  REQUIRE(s1.cols() == 2);

  const int draws = 20000;
  Matrix big = m.posterior_sample(xnew, draws, 7u);
  Matrix cov = m.posterior_cov(xnew);
  for (int j = 0; j < 2; ++j) {
    const double mean = big.col(j).mean();
    const double expect = m.predict(xnew.row(j).transpose()).mean;
    const double se = std::sqrt(cov(j, j) / draws);
    CHECK(std::abs(mean - expect) < 5.0 * se + 1e-12);
    const double var = (big.col(j).array() - mean).square().sum() / (draws - 1);
    CHECK(var == doctest::Approx(cov(j, j)).epsilon(0.08).scale(1e-9));
  }
  // cross-covariance of the draws tracks the posterior covariance
  const double m0 = big.col(0).mean();
  const double m1 = big.col(1).mean();
  const double cross =
      ((big.col(0).array() - m0) * (big.col(1).array() - m1)).sum() / (draws - 1);
  CHECK(cross == doctest::Approx(cov(0, 1)).epsilon(0.15).scale(1e-3));
}

TEST_CASE("refit_with reuses hyperparameters and normalization") {
  TrainingSet t = gp_draw(10, 0.5, 13u);
  BoxDomain d = unit_interval();
  GpModel base = fit(t, make_spec(1, 0.37, 1.9), Trend::estimate(), d);

  TrainingSet bigger = t;
  bigger.x.conservativeResize(11, 1);
  bigger.y.conservativeResize(11);
  bigger.x(10, 0) = 0.123;
  bigger.y[10] = 0.5;

  GpModel re = refit_with(base, bigger);
  CHECK(re.spec().lengthscales[0] == base.spec().lengthscales[0]);
  CHECK(re.spec().process_variance == base.spec().process_variance);
  CHECK(re.normalizer().offset()[0] == base.normalizer().offset()[0]);
  CHECK(re.normalizer().scale()[0] == base.normalizer().scale()[0]);

  GpModel direct = fit(bigger, base.spec(), Trend::estimate(), d);
  for (double q : {0.05, 0.42, 0.88}) {
    Vector x0(1);
    x0 << q;
    CHECK(re.predict(x0).mean == doctest::Approx(direct.predict(x0).mean).epsilon(1e-12));
    CHECK(re.predict(x0).variance ==
          doctest::Approx(direct.predict(x0).variance).epsilon(1e-12).scale(1e-12));
  }
}

TEST_CASE("normalizer from_points handles zero-range columns") {
  Matrix x(3, 2);
  x << 0.0, 5.0, 1.0, 5.0, 2.0, 5.0;
  Normalizer n = Normalizer::from_points(x);
  Matrix u = n.apply(x);
  CHECK(u.col(0).minCoeff() == doctest::Approx(0.0));
  CHECK(u.col(0).maxCoeff() == doctest::Approx(1.0));
  CHECK(u(0, 1) == doctest::Approx(0.0));  // constant column maps to zero with unit scale
  CHECK(n.scale()[1] == 1.0);
}

TEST_CASE("fit validation rejects malformed training data") {
  KernelSpec s = make_spec(1, 0.5);

  TrainingSet mismatched;
  mismatched.x = Matrix(3, 1);
  mismatched.x << 0.0, 0.5, 1.0;
  mismatched.y = Vector(2);
  mismatched.y << 0.0, 1.0;
  CHECK_THROWS_AS(fit(mismatched, s, Trend::estimate()), DimensionMismatch);

  TrainingSet nan_y = three_point_line();
  nan_y.y[1] = std::nan("");
  CHECK_THROWS_AS(fit(nan_y, s, Trend::estimate()), NonFiniteValue);

  TrainingSet nan_x = three_point_line();
  nan_x.x(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(fit(nan_x, s, Trend::estimate()), NonFiniteValue);

  TrainingSet dup = three_point_line();
  dup.x(2, 0) = dup.x(0, 0);
  CHECK_THROWS_AS(fit(dup, s, Trend::estimate()), DuplicatePoints);

  TrainingSet single;
  single.x = Matrix(1, 1);
  single.x << 0.5;
  single.y = Vector(1);
  single.y << 1.0;
  CHECK_THROWS_AS(fit(single, s, Trend::estimate()), InsufficientPoints);
  CHECK_NOTHROW(fit(single, s, Trend::known(0.0), unit_interval()));

  TrainingSet empty;
  empty.x = Matrix(0, 1);
  empty.y = Vector(0);
  CHECK_THROWS_AS(fit(empty, s, Trend::known(0.0)), InsufficientPoints);

  KernelSpec wrong_dim = make_spec(2, 0.5);
  CHECK_THROWS_AS(fit(three_point_line(), wrong_dim, Trend::estimate()), DimensionMismatch);

  GpModel ok = fit(three_point_line(), s, Trend::estimate(), unit_interval());
  Vector bad_point(1);
  bad_point << std::nan("");
  CHECK_THROWS_AS(ok.predict(bad_point), NonFiniteValue);
  Vector wrong_size(2);
  wrong_size << 0.1, 0.2;
  CHECK_THROWS_AS(ok.predict(wrong_size), DimensionMismatch);
}

TEST_CASE("a near-duplicate pair still fits thanks to the nugget") {
  TrainingSet t;
  t.x = Matrix(3, 1);
  t.x << 0.0, 1e-5, 1.0;
  t.y = Vector(3);
  t.y << 0.0, 0.01, 1.0;
  GpModel m = fit(t, make_spec(1, 1.0), Trend::estimate(), unit_interval());
  CHECK(m.nugget() >= kNuggetInitial);
  CHECK(m.nugget() <= kNuggetCap);
  Vector mid(1);
  mid << 0.5;
  CHECK(std::isfinite(m.predict(mid).mean));
}
