#include "krigopt/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace krigopt {

namespace {

// Uniform jitter strictly inside (0, 1): even the extreme draws keep a point
// off its stratum boundary.
double open_jitter(RngStream& stream) {
  return (static_cast<double>(stream.next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

std::vector<int> random_permutation(int n, RngStream& stream) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(stream.uniform_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

}  // namespace

void BoxDomain::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw InvalidParameter("BoxDomain: lower and upper must be non-empty and equally sized");
  }
  for (Eigen::Index j = 0; j < lower.size(); ++j) {
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j])) {
      throw InvalidParameter("BoxDomain: bounds must be finite in dimension " + std::to_string(j));
    }
    if (!(lower[j] < upper[j])) {
      throw InvalidParameter("BoxDomain: lower must be strictly below upper in dimension " +
                             std::to_string(j));
    }
  }
}

bool BoxDomain::contains(const Vector& x, double tol) const {
  if (x.size() != lower.size()) {
    throw DimensionMismatch("BoxDomain::contains: point dimension " + std::to_string(x.size()) +
                            " != domain dimension " + std::to_string(lower.size()));
  }
  for (Eigen::Index j = 0; j < lower.size(); ++j) {
    const double slack = tol * (upper[j] - lower[j]);
    if (x[j] < lower[j] - slack || x[j] > upper[j] + slack) {
      return false;
    }
  }
  return true;
}

Vector BoxDomain::clamp(const Vector& x) const {
  if (x.size() != lower.size()) {
    throw DimensionMismatch("BoxDomain::clamp: point dimension " + std::to_string(x.size()) +
                            " != domain dimension " + std::to_string(lower.size()));
  }
  return x.cwiseMax(lower).cwiseMin(upper);
}

Vector BoxDomain::normalize(const Vector& x) const {
  if (x.size() != lower.size()) {
    throw DimensionMismatch("BoxDomain::normalize: point dimension " + std::to_string(x.size()) +
                            " != domain dimension " + std::to_string(lower.size()));
  }
  return (x - lower).cwiseQuotient(upper - lower);
}

Vector BoxDomain::denormalize(const Vector& u) const {
  if (u.size() != lower.size()) {
    throw DimensionMismatch("BoxDomain::denormalize: point dimension " + std::to_string(u.size()) +
                            " != domain dimension " + std::to_string(lower.size()));
  }
  return lower + u.cwiseProduct(upper - lower);
}

BoxDomain BoxDomain::unit_cube(int dimension) {
  if (dimension < 1) {
    throw InvalidParameter("BoxDomain::unit_cube: dimension must be positive");
  }
  BoxDomain box;
  box.lower = Vector::Zero(dimension);
  box.upper = Vector::Ones(dimension);
  return box;
}

DesignMatrix lhs(int n, const BoxDomain& domain, std::uint64_t seed) {
  domain.validate();
  if (n < 1) {
    throw InvalidParameter("lhs: sample size must be positive, got " + std::to_string(n));
  }
  const int d = domain.dimension();
  RngStream stream(seed);
  Matrix points(n, d);
  for (int j = 0; j < d; ++j) {
    const std::vector<int> perm = random_permutation(n, stream);
    for (int i = 0; i < n; ++i) {
      const double u = (static_cast<double>(perm[i]) + open_jitter(stream)) / n;
      points(i, j) = domain.lower[j] + (domain.upper[j] - domain.lower[j]) * u;
    }
  }
  return DesignMatrix{std::move(points), domain};
}

double min_pairwise_distance(const Matrix& points, const BoxDomain& domain) {
  domain.validate();
  if (points.cols() != domain.dimension()) {
    throw DimensionMismatch("min_pairwise_distance: points have dimension " +
                            std::to_string(points.cols()) + ", domain has " +
                            std::to_string(domain.dimension()));
  }
  const Eigen::Index n = points.rows();
  if (n < 2) {
    return std::numeric_limits<double>::infinity();
  }
  const Vector inv_width = domain.width().cwiseInverse();
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Vector diff = (points.row(i) - points.row(j)).transpose().cwiseProduct(inv_width);
      best = std::min(best, diff.norm());
    }
  }
  return best;
}

DesignMatrix maximin_improve(const DesignMatrix& design, int iterations, std::uint64_t seed) {
  design.domain.validate();
  if (iterations < 0) {
    throw InvalidParameter("maximin_improve: iterations must be non-negative");
  }
  if (design.points.cols() != design.domain.dimension()) {
    throw DimensionMismatch("maximin_improve: design dimension mismatch");
  }
  DesignMatrix out = design;
  const int n = out.size();
  const int d = out.dimension();
  if (n < 2 || d < 1) {
    return out;
  }
  RngStream stream(seed);
  double current = min_pairwise_distance(out.points, out.domain);
  for (int it = 0; it < iterations; ++it) {
    const int col = static_cast<int>(stream.uniform_below(d));
    const int a = static_cast<int>(stream.uniform_below(n));
    int b = static_cast<int>(stream.uniform_below(n - 1));
    if (b >= a) {
      ++b;
    }
    std::swap(out.points(a, col), out.points(b, col));
    const double candidate = min_pairwise_distance(out.points, out.domain);
    if (candidate > current) {
      current = candidate;
    } else {
      std::swap(out.points(a, col), out.points(b, col));
    }
  }
  return out;
}

}  // namespace krigopt
