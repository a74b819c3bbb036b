#pragma once

#include <cstdint>

#include "krigopt/numerics.hpp"

namespace krigopt {

// Axis-aligned box of search-space bounds, one (lower, upper) pair per input
// dimension with lower < upper.
struct BoxDomain {
  Vector lower;
  Vector upper;

  int dimension() const { return static_cast<int>(lower.size()); }

  // Throws InvalidParameter unless dimensions agree, every bound is finite,
  // and lower[j] < upper[j] for all j.
  void validate() const;

  Vector width() const { return upper - lower; }

  bool contains(const Vector& x, double tol = 0.0) const;

  // Projects x onto the box, coordinate by coordinate.
  Vector clamp(const Vector& x) const;

  // Affine map onto [0,1]^d and back.
  Vector normalize(const Vector& x) const;
  Vector denormalize(const Vector& u) const;

  static BoxDomain unit_cube(int dimension);
};

// A set of n candidate inputs (rows) together with the box they sample.
struct DesignMatrix {
  Matrix points;  // n x d, every row inside domain
  BoxDomain domain;

  int size() const { return static_cast<int>(points.rows()); }
  int dimension() const { return static_cast<int>(points.cols()); }
};

// Latin hypercube sample of n points: for every dimension, each of the n
// equal-width strata holds exactly one point, placed strictly inside its
// stratum by a uniform jitter.  Deterministic in seed.
DesignMatrix lhs(int n, const BoxDomain& domain, std::uint64_t seed);

// Smallest pairwise Euclidean distance between rows, computed on
// box-normalized coordinates so dimensions with large physical ranges do not
// dominate.  Returns +infinity for fewer than two rows.
double min_pairwise_distance(const Matrix& points, const BoxDomain& domain);

// Greedy maximin refinement: proposes random within-column swaps of two
// points' coordinates (which preserves the Latin hypercube strata) and keeps
// a swap only when the minimum pairwise distance strictly increases.  Runs
// `iterations` proposals; deterministic in seed.
DesignMatrix maximin_improve(const DesignMatrix& design, int iterations, std::uint64_t seed);

}  // namespace krigopt
