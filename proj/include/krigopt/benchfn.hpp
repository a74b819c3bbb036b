#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "krigopt/design.hpp"
#include "krigopt/kernel.hpp"

namespace krigopt {

// Branin function on [-5, 10] x [0, 15]; three global minima of value
// 0.39788735772973834 at (-pi, 12.275), (pi, 2.275), (9.42478, 2.475).
double branin(const Vector& x);

// Six-dimensional Hartmann function on [0, 1]^6; global minimum
// -3.322368011415513.
double hartmann6(const Vector& x);

// Named benchmark with its domain and known optimum (all registry entries
// are minimization problems).
struct ObjectiveSpec {
  std::string name;
  BoxDomain domain;
  double optimum_value = 0.0;
  Matrix optimum_points;  // one known minimizer per row
  std::function<double(const Vector&)> evaluate;
};

// Registry lookup by name ("branin", "hartmann6"); unknown names raise
// InvalidParameter.
const ObjectiveSpec& find_objective(const std::string& name);
std::vector<std::string> objective_names();

// Deterministic smooth test function: a kernel expansion
// f(x) = sum_i w_i k(x, a_i) over `anchor_count` Latin-hypercube anchor
// points with standard normal weights.  Distances are measured in
// domain-normalized coordinates, so spec.lengthscales are normalized units.
// Identical seeds give identical functions.
std::function<double(const Vector&)> synthetic_gp_objective(const KernelSpec& spec,
                                                            const BoxDomain& domain,
                                                            int anchor_count,
                                                            std::uint64_t seed);

}  // namespace krigopt
