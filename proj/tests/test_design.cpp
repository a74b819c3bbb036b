#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <krigopt/design.hpp>
#include <krigopt/errors.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace krigopt;

namespace {

BoxDomain box2() {
  BoxDomain d;
  d.lower = Vector(2);
  d.upper = Vector(2);
  d.lower << -5.0, 0.0;
  d.upper << 10.0, 15.0;
  return d;
}

// every column must place exactly one point in each of the n equal strata
bool has_lhs_strata(const DesignMatrix& design) {
  const int n = static_cast<int>(design.points.rows());
  const int dim = static_cast<int>(design.points.cols());
  for (int j = 0; j < dim; ++j) {
    std::vector<int> bins(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
      const double u = (design.points(i, j) - design.domain.lower[j]) /
                       (design.domain.upper[j] - design.domain.lower[j]);
      const int b = std::min(n - 1, static_cast<int>(std::floor(u * n)));
      if (b < 0) return false;
      bins[static_cast<std::size_t>(b)]++;
    }
    for (int b : bins) {
      if (b != 1) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("BoxDomain validates, normalizes, and clamps") {
  BoxDomain d = box2();
  CHECK_NOTHROW(d.validate());
  CHECK(d.dimension() == 2);
  CHECK(d.width()[0] == doctest::Approx(15.0));

  Vector x(2);
  x << 2.5, 7.5;
  Vector u = d.normalize(x);
  CHECK(u[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(u[1] == doctest::Approx(0.5).epsilon(1e-15));
  Vector back = d.denormalize(u);
  CHECK(back[0] == doctest::Approx(x[0]).epsilon(1e-15));
  CHECK(back[1] == doctest::Approx(x[1]).epsilon(1e-15));

  Vector outside(2);
  outside << -7.0, 20.0;
  CHECK_FALSE(d.contains(outside));
  Vector clamped = d.clamp(outside);
  CHECK(clamped[0] == -5.0);
  CHECK(clamped[1] == 15.0);
  CHECK(d.contains(clamped));

  BoxDomain unit = BoxDomain::unit_cube(3);
  CHECK(unit.dimension() == 3);
  CHECK(unit.lower.minCoeff() == 0.0);
  CHECK(unit.upper.maxCoeff() == 1.0);

  BoxDomain bad;
  bad.lower = Vector(2);
  bad.upper = Vector(2);
  bad.lower << 0.0, 1.0;
  bad.upper << 1.0, 1.0;  // zero width
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
  BoxDomain mismatched;
  mismatched.lower = Vector(2);
  mismatched.upper = Vector(3);
  mismatched.lower.setZero();
  mismatched.upper.setOnes();
  CHECK_THROWS_AS(mismatched.validate(), InvalidParameter);
}

TEST_CASE("lhs is deterministic per seed and stratified per dimension") {
  BoxDomain d = box2();
  DesignMatrix a = lhs(17, d, 42u);
  DesignMatrix b = lhs(17, d, 42u);
  CHECK((a.points - b.points).cwiseAbs().maxCoeff() == 0.0);

  DesignMatrix c = lhs(17, d, 43u);
  CHECK((a.points - c.points).cwiseAbs().maxCoeff() > 0.0);

  CHECK(a.size() == 17);
  CHECK(a.dimension() == 2);
  CHECK(has_lhs_strata(a));

  // points are strictly inside the box
  for (int i = 0; i < 17; ++i) {
    for (int j = 0; j < 2; ++j) {
      CHECK(a.points(i, j) > d.lower[j]);
      CHECK(a.points(i, j) < d.upper[j]);
    }
  }
}

TEST_CASE("lhs works for a single point and rejects bad sizes") {
  BoxDomain d = box2();
  DesignMatrix one = lhs(1, d, 5u);
  CHECK(one.size() == 1);
  CHECK(d.contains(one.points.row(0).transpose()));
  CHECK_THROWS_AS(lhs(0, d, 5u), InvalidParameter);
  CHECK_THROWS_AS(lhs(-3, d, 5u), InvalidParameter);
}

TEST_CASE("min_pairwise_distance uses normalized coordinates") {
  BoxDomain d = box2();
  Matrix pts(2, 2);
  pts << -5.0, 0.0, 10.0, 15.0;  // opposite corners: normalized distance sqrt(2)
  CHECK(min_pairwise_distance(pts, d) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  Matrix single(1, 2);
  single << 0.0, 0.0;
  CHECK(std::isinf(min_pairwise_distance(single, d)));

  Matrix three(3, 2);
  three << -5.0, 0.0, 10.0, 15.0, -5.0, 1.5;  // last is 0.1 away (normalized) from first
  CHECK(min_pairwise_distance(three, d) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("maximin_improve never reduces the minimum distance and keeps strata") {
  BoxDomain d = box2();
  DesignMatrix base = lhs(20, d, 7u);
  const double before = min_pairwise_distance(base.points, d);
  DesignMatrix improved = maximin_improve(base, 500, 99u);
  const double after = min_pairwise_distance(improved.points, d);
  CHECK(after >= before);
  CHECK(has_lhs_strata(improved));

  // deterministic
  DesignMatrix improved2 = maximin_improve(base, 500, 99u);
  CHECK((improved.points - improved2.points).cwiseAbs().maxCoeff() == 0.0);

  // zero iterations is the identity
  DesignMatrix same = maximin_improve(base, 0, 99u);
  CHECK((same.points - base.points).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(maximin_improve(base, -1, 99u), InvalidParameter);
}

TEST_CASE("maximin_improve typically spreads points versus the raw draw") {
  BoxDomain d = BoxDomain::unit_cube(2);
  int improved_count = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    DesignMatrix base = lhs(15, d, seed);
    DesignMatrix better = maximin_improve(base, 2000, seed + 100);
    if (min_pairwise_distance(better.points, d) > min_pairwise_distance(base.points, d)) {
      improved_count++;
    }
  }
  CHECK(improved_count >= 4);
}
