#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "krigopt/errors.hpp"

namespace krigopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Lower-triangular Cholesky factor L of a symmetric positive-definite matrix,
// L * L^T = A.  Produced by cholesky(); kept around so that repeated solves
// against the same matrix are O(n^2).
class CholeskyFactor {
 public:
  explicit CholeskyFactor(Matrix lower);

  int order() const { return static_cast<int>(lower_.rows()); }
  const Matrix& lower() const { return lower_; }

  // Solves (L L^T) v = rhs.
  Vector solve(const Vector& rhs) const;
  Matrix solve(const Matrix& rhs) const;

  // Solves L v = rhs (forward substitution only).
  Vector solve_lower(const Vector& rhs) const;
  Matrix solve_lower(const Matrix& rhs) const;

  // log det(L L^T) = 2 * sum_i log L_ii.
  double log_det() const;

 private:
  Matrix lower_;
};

// Factors a symmetric positive-definite matrix.  Throws NotPositiveDefinite
// when a pivot is non-positive (within floating-point tolerance), and
// InvalidParameter when the input is empty, non-square, or asymmetric beyond
// 1e-12 relative tolerance.
CholeskyFactor cholesky(const Matrix& a);

// Standard normal density and distribution function.
double std_normal_pdf(double z);
double std_normal_cdf(double z);

// Deterministic seed derivation for independent substreams.  k == 0 returns
// the seed unchanged, so the first substream of a campaign coincides with the
// campaign stream itself; k > 0 applies an avalanching mix so that nearby k
// yield unrelated seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k);

// Deterministic random stream.  Identical seeds produce identical sequences
// on every platform (mt19937_64 plus fixed-order transforms; no libc
// dependence).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01();

  // Uniform on (0, 1]; safe as a log() argument.
  double uniform_open01();

  // Uniform on [lo, hi).
  double uniform(double lo, double hi);

  // Uniform integer on {0, 1, ..., n-1} via rejection sampling (unbiased).
  std::uint64_t uniform_below(std::uint64_t n);

  // Standard normal via Box-Muller; always consumes exactly two uniforms.
  double normal();

  // Child stream independent of this stream's continuation.  Splitting never
  // advances the parent, and split(k) for distinct k give unrelated streams.
  RngStream split(std::uint64_t k) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace krigopt
