#include "krigopt/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace krigopt {

namespace {

// Non-finite objective values are treated as +infinity so the simplex backs
// away from them instead of poisoning comparisons.
double guarded(const std::function<double(const Vector&)>& f, const Vector& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

NelderMeadResult nelder_mead_box(const std::function<double(const Vector&)>& objective,
                                 const Vector& start, const BoxDomain& box,
                                 const NelderMeadOptions& options) {
  box.validate();
  if (start.size() != box.dimension()) {
    throw DimensionMismatch("nelder_mead_box: start dimension " + std::to_string(start.size()) +
                            " != box dimension " + std::to_string(box.dimension()));
  }
  if (options.max_evals < 1) {
    throw InvalidParameter("nelder_mead_box: max_evals must be positive");
  }
  if (!(options.initial_step > 0.0) || options.initial_step > 1.0) {
    throw InvalidParameter("nelder_mead_box: initial_step must lie in (0, 1]");
  }
  if (!box.contains(start)) {
    throw InvalidParameter("nelder_mead_box: start point lies outside the box");
  }

  const int d = box.dimension();
  const Vector width = box.width();

  // Standard coefficients: reflection 1, expansion 2, contraction 1/2,
  // shrink 1/2.
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  int evals = 0;
  auto eval = [&](const Vector& x) {
    ++evals;
    return guarded(objective, box.clamp(x));
  };

  // Initial simplex: the start plus one vertex per coordinate, stepped away
  // from the nearer boundary so every vertex stays inside the box.
  std::vector<Vector> vertex(d + 1);
  std::vector<double> value(d + 1);
  vertex[0] = box.clamp(start);
  value[0] = eval(vertex[0]);
  for (int j = 0; j < d; ++j) {
    Vector v = vertex[0];
    const double h = options.initial_step * width[j];
    v[j] = (v[j] + h <= box.upper[j]) ? v[j] + h : v[j] - h;
    vertex[j + 1] = v;
    value[j + 1] = evals < options.max_evals
                       ? eval(v)
                       : std::numeric_limits<double>::infinity();
  }

  std::vector<int> order(d + 1);
  auto sort_simplex = [&]() {
    for (int i = 0; i <= d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return value[a] < value[b]; });
  };

  while (evals < options.max_evals) {
    sort_simplex();
    const int best = order[0];
    const int worst = order[d];
    const int second_worst = order[d - 1];

    // Convergence: simplex extent below tolerance in every coordinate,
    // relative to box width.
    bool converged = true;
    for (int j = 0; j < d && converged; ++j) {
      double lo = vertex[0][j], hi = vertex[0][j];
      for (int i = 1; i <= d; ++i) {
        lo = std::min(lo, vertex[i][j]);
        hi = std::max(hi, vertex[i][j]);
      }
      if (hi - lo > options.tol_simplex * width[j]) {
        converged = false;
      }
    }
    if (converged) {
      break;
    }

    Vector centroid = Vector::Zero(d);
    for (int i = 0; i <= d; ++i) {
      if (i != worst) {
        centroid += vertex[i];
      }
    }
    centroid /= d;

    const Vector reflected = box.clamp(centroid + kReflect * (centroid - vertex[worst]));
    const double f_reflected = eval(reflected);

    if (f_reflected < value[best]) {
      if (evals < options.max_evals) {
        const Vector expanded = box.clamp(centroid + kExpand * (centroid - vertex[worst]));
        const double f_expanded = eval(expanded);
        if (f_expanded < f_reflected) {
          vertex[worst] = expanded;
          value[worst] = f_expanded;
          continue;
        }
      }
      vertex[worst] = reflected;
      value[worst] = f_reflected;
    } else if (f_reflected < value[second_worst]) {
      vertex[worst] = reflected;
      value[worst] = f_reflected;
    } else {
      if (evals >= options.max_evals) {
        break;
      }
      const bool outside = f_reflected < value[worst];
      const Vector contracted =
          outside ? box.clamp(centroid + kContract * (reflected - centroid))
                  : box.clamp(centroid + kContract * (vertex[worst] - centroid));
      const double f_contracted = eval(contracted);
      if (f_contracted < std::min(f_reflected, value[worst])) {
        vertex[worst] = contracted;
        value[worst] = f_contracted;
      } else {
        // Shrink toward the best vertex.
        for (int i = 0; i <= d; ++i) {
          if (i == best) {
            continue;
          }
          vertex[i] = box.clamp(vertex[best] + kShrink * (vertex[i] - vertex[best]));
          value[i] = evals < options.max_evals
                         ? eval(vertex[i])
                         : std::numeric_limits<double>::infinity();
        }
      }
    }
  }

  sort_simplex();
  NelderMeadResult result;
  result.x = vertex[order[0]];
  result.value = value[order[0]];
  result.evals = evals;
  if (!std::isfinite(result.value)) {
    // Every probe failed; report the clamped start so callers get a valid
    // point with an honest infinite value.
    result.x = box.clamp(start);
  }
  return result;
}

}  // namespace krigopt
