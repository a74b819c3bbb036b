#include "krigopt/kernel.hpp"

#include <cmath>

namespace krigopt {

namespace {

const double kSqrt5 = std::sqrt(5.0);

// Accumulates one coordinate's contribution so the full product needs a
// single exp() per pair: every family factors as poly * exp(-s) with s
// additive across coordinates.
struct ProductAccumulator {
  double poly = 1.0;
  double expo = 0.0;

  void add(KernelFamily family, double distance, double theta) {
    const double d = std::abs(distance);
    switch (family) {
      case KernelFamily::matern52: {
        const double t = kSqrt5 * d / theta;
        poly *= 1.0 + t + t * t / 3.0;
        expo += t;
        break;
      }
      case KernelFamily::gaussian: {
        const double t = d / theta;
        expo += 0.5 * t * t;
        break;
      }
      case KernelFamily::exponential: {
        expo += d / theta;
        break;
      }
    }
  }

  double value() const { return poly * std::exp(-expo); }
};

void check_point_dimension(const KernelSpec& spec, const Vector& x, const char* what) {
  if (x.size() != spec.dimension()) {
    throw DimensionMismatch(std::string(what) + ": point has dimension " +
                            std::to_string(x.size()) + ", kernel expects " +
                            std::to_string(spec.dimension()));
  }
}

}  // namespace

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::matern52:
      return "matern52";
    case KernelFamily::gaussian:
      return "gaussian";
    case KernelFamily::exponential:
      return "exponential";
  }
  throw InvalidParameter("to_string: unknown kernel family");
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "matern52") return KernelFamily::matern52;
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "exponential") return KernelFamily::exponential;
  throw InvalidParameter("unknown kernel family '" + name +
                         "' (expected matern52, gaussian, or exponential)");
}

void KernelSpec::validate() const {
  if (lengthscales.size() == 0) {
    throw InvalidParameter("KernelSpec: at least one lengthscale required");
  }
  for (Eigen::Index j = 0; j < lengthscales.size(); ++j) {
    if (!std::isfinite(lengthscales[j]) || lengthscales[j] <= 0.0) {
      throw InvalidParameter("KernelSpec: lengthscale " + std::to_string(j) +
                             " must be finite and positive, got " +
                             std::to_string(lengthscales[j]));
    }
  }
  if (!std::isfinite(process_variance) || process_variance <= 0.0) {
    throw InvalidParameter("KernelSpec: process variance must be finite and positive, got " +
                           std::to_string(process_variance));
  }
}

double correlation_1d(KernelFamily family, double distance, double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw InvalidParameter("correlation_1d: theta must be finite and positive");
  }
  if (distance < 0.0 || !std::isfinite(distance)) {
    throw InvalidParameter("correlation_1d: distance must be finite and non-negative");
  }
  ProductAccumulator acc;
  acc.add(family, distance, theta);
  return acc.value();
}

double covariance(const KernelSpec& spec, const Vector& x, const Vector& y) {
  spec.validate();
  check_point_dimension(spec, x, "covariance");
  check_point_dimension(spec, y, "covariance");
  ProductAccumulator acc;
  for (int j = 0; j < spec.dimension(); ++j) {
    acc.add(spec.family, x[j] - y[j], spec.lengthscales[j]);
  }
  return spec.process_variance * acc.value();
}

Matrix covariance_matrix(const KernelSpec& spec, const Matrix& x) {
  spec.validate();
  if (x.cols() != spec.dimension()) {
    throw DimensionMismatch("covariance_matrix: points have dimension " +
                            std::to_string(x.cols()) + ", kernel expects " +
                            std::to_string(spec.dimension()));
  }
  const Eigen::Index n = x.rows();
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = spec.process_variance;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      ProductAccumulator acc;
      for (int dim = 0; dim < spec.dimension(); ++dim) {
        acc.add(spec.family, x(i, dim) - x(j, dim), spec.lengthscales[dim]);
      }
      const double v = spec.process_variance * acc.value();
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Vector covariance_vector(const KernelSpec& spec, const Matrix& x, const Vector& x0) {
  spec.validate();
  if (x.cols() != spec.dimension()) {
    throw DimensionMismatch("covariance_vector: points have dimension " +
                            std::to_string(x.cols()) + ", kernel expects " +
                            std::to_string(spec.dimension()));
  }
  check_point_dimension(spec, x0, "covariance_vector");
  Vector r(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    ProductAccumulator acc;
    for (int dim = 0; dim < spec.dimension(); ++dim) {
      acc.add(spec.family, x(i, dim) - x0[dim], spec.lengthscales[dim]);
    }
    r[i] = spec.process_variance * acc.value();
  }
  return r;
}

}  // namespace krigopt
