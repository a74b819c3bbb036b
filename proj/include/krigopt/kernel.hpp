#pragma once

#include <string>

#include "krigopt/numerics.hpp"

namespace krigopt {

// Stationary correlation families, applied per coordinate and multiplied
// across coordinates (separable/tensor-product form).
enum class KernelFamily {
  matern52,     // (1 + sqrt(5) d/theta + 5 d^2 / (3 theta^2)) exp(-sqrt(5) d/theta)
  gaussian,     // exp(-d^2 / (2 theta^2))
  exponential,  // exp(-d/theta)
};

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

// Covariance hyperparameters: one lengthscale per input dimension plus a
// process variance.  k(x, y) = process_variance * prod_j rho(|x_j - y_j|; theta_j).
struct KernelSpec {
  KernelFamily family = KernelFamily::matern52;
  Vector lengthscales;
  double process_variance = 1.0;

  int dimension() const { return static_cast<int>(lengthscales.size()); }

  // Throws InvalidParameter unless every lengthscale and the process variance
  // are finite and strictly positive.
  void validate() const;
};

// One-dimensional correlation rho(d; theta) for non-negative distance d.
// rho(0) = 1 for every family and rho decreases monotonically in d.
double correlation_1d(KernelFamily family, double distance, double theta);

// k(x, y) for points of the spec's dimension.
double covariance(const KernelSpec& spec, const Vector& x, const Vector& y);

// N x N covariance matrix of the rows of X (N x d).  Symmetric with constant
// diagonal process_variance.
Matrix covariance_matrix(const KernelSpec& spec, const Matrix& x);

// Length-N vector of covariances between each row of X and the single point
// x0.
Vector covariance_vector(const KernelSpec& spec, const Matrix& x, const Vector& x0);

}  // namespace krigopt
