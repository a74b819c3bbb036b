#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "krigopt/kriging.hpp"

namespace krigopt {

// Best response observed so far (maximization orientation).
struct Incumbent {
  double value = 0.0;
};

// Closed-form expected improvement of the model's prediction at x over the
// incumbent.  Non-negative; exactly max(mean - incumbent, 0) when the
// predictive standard deviation underflows the guard 1e-12 * process sd.
double expected_improvement(const GpModel& model, const Vector& x, const Incumbent& incumbent);

struct QeiEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Monte Carlo estimate of the joint (batch) expected improvement
// E[max(0, max_j Y(x_j) - incumbent)] over the rows of `points`, with the
// standard error of the mean.  Deterministic in seed; identical seeds share
// the underlying normal draws, so two batches can be compared with common
// random numbers.
QeiEstimate qei_mc(const GpModel& model, const Matrix& points, const Incumbent& incumbent,
                   int draws, std::uint64_t seed);

struct AcquisitionOptions {
  int starts = 20;          // multistart count for the inner search
  int evals_per_start = 0;  // EI evaluations per start; 0 = 200 * d
};

struct AcquisitionMaximum {
  Vector point;
  double ei = 0.0;
};

// Multistart Nelder-Mead maximization of expected improvement over the box.
// Deterministic in seed; the returned point always lies inside the box.
AcquisitionMaximum maximize_acquisition(const GpModel& model, const Incumbent& incumbent,
                                        const BoxDomain& box, std::uint64_t seed,
                                        const AcquisitionOptions& options = AcquisitionOptions{});

// Constant-liar batch strategies: after each selected point the model is
// refit with a fabricated response (the "lie") so the next selection avoids
// the same basin.
enum class LiarKind {
  cl_min,    // lie with the smallest observed response (exploratory)
  cl_max,    // lie with the largest observed response (exploitative)
  cl_mean,   // lie with the model's own predictive mean
  cl_mixed,  // build cl_min and cl_max batches, keep the better by MC qEI
};

std::string to_string(LiarKind kind);
LiarKind liar_from_string(const std::string& name);

struct BatchProposal {
  Matrix points;  // batch_size x d, all inside the search box
  Vector ei;      // single-point EI of each entry at its selection time
  LiarKind strategy = LiarKind::cl_min;
  std::optional<QeiEstimate> qei;  // set for cl_mixed: the winning batch's estimate
};

struct BatchOptions {
  AcquisitionOptions acquisition;
  int qei_draws = 10000;  // Monte Carlo draws for the cl_mixed comparison
};

// Proposes batch_size points by the constant-liar protocol.  The effective
// incumbent during construction is the running maximum of the true incumbent
// and all lies handed to the model.  With batch_size == 1 every strategy
// reduces to maximize_acquisition with the same seed.  Deterministic in seed.
BatchProposal propose_batch_cl(const GpModel& model, const Incumbent& incumbent,
                               const BoxDomain& box, int batch_size, LiarKind kind,
                               std::uint64_t seed, const BatchOptions& options = BatchOptions{});

}  // namespace krigopt
