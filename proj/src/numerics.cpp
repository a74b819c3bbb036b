#include "krigopt/numerics.hpp"

#include <cmath>
#include <limits>

namespace krigopt {

namespace {

constexpr double kPi = 3.14159265358979323846;

// splitmix64 finalizer; full-avalanche 64-bit mix.
std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

CholeskyFactor::CholeskyFactor(Matrix lower) : lower_(std::move(lower)) {
  if (lower_.rows() == 0 || lower_.rows() != lower_.cols()) {
    throw InvalidParameter("CholeskyFactor: factor must be square and non-empty");
  }
}

Vector CholeskyFactor::solve(const Vector& rhs) const {
  if (rhs.size() != lower_.rows()) {
    throw DimensionMismatch("CholeskyFactor::solve: rhs length " + std::to_string(rhs.size()) +
                            " != order " + std::to_string(lower_.rows()));
  }
  Vector v = lower_.triangularView<Eigen::Lower>().solve(rhs);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(v);
}

Matrix CholeskyFactor::solve(const Matrix& rhs) const {
  if (rhs.rows() != lower_.rows()) {
    throw DimensionMismatch("CholeskyFactor::solve: rhs has " + std::to_string(rhs.rows()) +
                            " rows, expected " + std::to_string(lower_.rows()));
  }
  Matrix v = lower_.triangularView<Eigen::Lower>().solve(rhs);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(v);
}

Vector CholeskyFactor::solve_lower(const Vector& rhs) const {
  if (rhs.size() != lower_.rows()) {
    throw DimensionMismatch("CholeskyFactor::solve_lower: rhs length " +
                            std::to_string(rhs.size()) + " != order " +
                            std::to_string(lower_.rows()));
  }
  return lower_.triangularView<Eigen::Lower>().solve(rhs);
}

Matrix CholeskyFactor::solve_lower(const Matrix& rhs) const {
  if (rhs.rows() != lower_.rows()) {
    throw DimensionMismatch("CholeskyFactor::solve_lower: rhs has " + std::to_string(rhs.rows()) +
                            " rows, expected " + std::to_string(lower_.rows()));
  }
  return lower_.triangularView<Eigen::Lower>().solve(rhs);
}

double CholeskyFactor::log_det() const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < lower_.rows(); ++i) {
    acc += std::log(lower_(i, i));
  }
  return 2.0 * acc;
}

CholeskyFactor cholesky(const Matrix& a) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw InvalidParameter("cholesky: matrix must be square and non-empty, got " +
                           std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  if (!a.allFinite()) {
    throw InvalidParameter("cholesky: matrix has non-finite entries");
  }
  const double scale = a.cwiseAbs().maxCoeff();
  const double sym_tol = 1e-12 * std::max(1.0, scale);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      if (std::abs(a(i, j) - a(j, i)) > sym_tol) {
        throw InvalidParameter("cholesky: matrix is not symmetric at (" + std::to_string(i) +
                               "," + std::to_string(j) + ")");
      }
    }
  }
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("cholesky: matrix is not positive definite");
  }
  Matrix lower = llt.matrixL();
  // Eigen accepts a zero pivot in exactly-singular edge cases; reject those
  // too so downstream solves never divide by zero.
  for (Eigen::Index i = 0; i < lower.rows(); ++i) {
    if (!(lower(i, i) > 0.0) || !std::isfinite(lower(i, i))) {
      throw NotPositiveDefinite("cholesky: non-positive pivot at index " + std::to_string(i));
    }
  }
  return CholeskyFactor(std::move(lower));
}

double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
}

double std_normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
  if (k == 0) {
    return seed;
  }
  return mix64(seed + k * kGolden);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t RngStream::next_u64() {
  return engine_();
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open01() {
  return 1.0 - uniform01();
}

double RngStream::uniform(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw InvalidParameter("uniform: bounds must be finite with lo < hi");
  }
  return lo + (hi - lo) * uniform01();
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  if (n == 0) {
    throw InvalidParameter("uniform_below: n must be positive");
  }
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

double RngStream::normal() {
  const double u1 = uniform_open01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

RngStream RngStream::split(std::uint64_t k) const {
  // Unlike derive_seed, k == 0 still mixes: a split child must never replay
  // its parent.
  return RngStream(mix64(seed_ ^ (0xD1B54A32D192ED03ULL + k * kGolden)));
}

}  // namespace krigopt
