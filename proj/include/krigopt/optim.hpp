#pragma once

#include <functional>

#include "krigopt/design.hpp"

namespace krigopt {

// Derivative-free simplex minimizer over a box, used for likelihood and
// acquisition searches.  Candidates are projected onto the box before
// evaluation, so the objective is never called outside it.
struct NelderMeadOptions {
  int max_evals = 200;          // hard budget on objective evaluations
  double initial_step = 0.05;   // first simplex edge, as a fraction of box width
  double tol_simplex = 1e-10;   // stop when the simplex shrinks below this
                                // fraction of box width in every coordinate
};

struct NelderMeadResult {
  Vector x;
  double value = 0.0;
  int evals = 0;
};

NelderMeadResult nelder_mead_box(const std::function<double(const Vector&)>& objective,
                                 const Vector& start, const BoxDomain& box,
                                 const NelderMeadOptions& options);

}  // namespace krigopt
