#include "krigopt/benchfn.hpp"

#include <cmath>
#include <memory>

namespace krigopt {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_dimension(const Vector& x, int expected, const char* name) {
  if (x.size() != expected) {
    throw DimensionMismatch(std::string(name) + ": point has dimension " +
                            std::to_string(x.size()) + ", expected " + std::to_string(expected));
  }
  if (!x.allFinite()) {
    throw NonFiniteValue(std::string(name) + ": point contains a non-finite coordinate");
  }
}

}  // namespace

double branin(const Vector& x) {
  check_dimension(x, 2, "branin");
  const double a = 1.0;
  const double b = 5.1 / (4.0 * kPi * kPi);
  const double c = 5.0 / kPi;
  const double r = 6.0;
  const double s = 10.0;
  const double t = 1.0 / (8.0 * kPi);
  const double term = x[1] - b * x[0] * x[0] + c * x[0] - r;
  return a * term * term + s * (1.0 - t) * std::cos(x[0]) + s;
}

double hartmann6(const Vector& x) {
  check_dimension(x, 6, "hartmann6");
  static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static const double a[4][6] = {
      {10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
      {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
      {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
      {17.0, 8.0, 0.05, 10.0, 0.1, 14.0},
  };
  static const double p[4][6] = {
      {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
      {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
      {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
      {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381},
  };
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    double expo = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double d = x[j] - p[i][j];
      expo += a[i][j] * d * d;
    }
    total += alpha[i] * std::exp(-expo);
  }
  return -total;
}

namespace {

std::vector<ObjectiveSpec> make_registry() {
  std::vector<ObjectiveSpec> registry;

  {
    ObjectiveSpec spec;
    spec.name = "branin";
    spec.domain.lower = (Vector(2) << -5.0, 0.0).finished();
    spec.domain.upper = (Vector(2) << 10.0, 15.0).finished();
    spec.optimum_value = 0.39788735772973834;
    spec.optimum_points.resize(3, 2);
    spec.optimum_points << -kPi, 12.275, kPi, 2.275, 9.42478, 2.475;
    spec.evaluate = branin;
    registry.push_back(std::move(spec));
  }

  {
    ObjectiveSpec spec;
    spec.name = "hartmann6";
    spec.domain = BoxDomain::unit_cube(6);
    spec.optimum_value = -3.322368011415513;
    spec.optimum_points.resize(1, 6);
    spec.optimum_points << 0.20168952, 0.15001069, 0.47687398, 0.27533243, 0.31165162,
        0.65730054;
    spec.evaluate = hartmann6;
    registry.push_back(std::move(spec));
  }

  return registry;
}

const std::vector<ObjectiveSpec>& registry() {
  static const std::vector<ObjectiveSpec> entries = make_registry();
  return entries;
}

}  // namespace

const ObjectiveSpec& find_objective(const std::string& name) {
  for (const ObjectiveSpec& spec : registry()) {
    if (spec.name == name) {
      return spec;
    }
  }
  throw InvalidParameter("unknown objective '" + name + "' (available: branin, hartmann6)");
}

std::vector<std::string> objective_names() {
  std::vector<std::string> names;
  for (const ObjectiveSpec& spec : registry()) {
    names.push_back(spec.name);
  }
  return names;
}

std::function<double(const Vector&)> synthetic_gp_objective(const KernelSpec& spec,
                                                            const BoxDomain& domain,
                                                            int anchor_count,
                                                            std::uint64_t seed) {
  spec.validate();
  domain.validate();
  if (spec.dimension() != domain.dimension()) {
    throw DimensionMismatch("synthetic_gp_objective: kernel dimension " +
                            std::to_string(spec.dimension()) + " != domain dimension " +
                            std::to_string(domain.dimension()));
  }
  if (anchor_count < 1) {
    throw InvalidParameter("synthetic_gp_objective: anchor count must be positive");
  }

  struct Expansion {
    KernelSpec spec;
    BoxDomain domain;
    Matrix anchors_normalized;
    Vector weights;
  };
  auto state = std::make_shared<Expansion>();
  state->spec = spec;
  state->domain = domain;

  const DesignMatrix anchors = lhs(anchor_count, domain, derive_seed(seed, 1));
  state->anchors_normalized.resize(anchor_count, domain.dimension());
  for (int i = 0; i < anchor_count; ++i) {
    state->anchors_normalized.row(i) =
        domain.normalize(anchors.points.row(i).transpose()).transpose();
  }
  RngStream weight_stream(derive_seed(seed, 2));
  state->weights.resize(anchor_count);
  for (int i = 0; i < anchor_count; ++i) {
    state->weights[i] = weight_stream.normal();
  }

  return [state](const Vector& x) {
    if (x.size() != state->domain.dimension()) {
      throw DimensionMismatch("synthetic objective: point has dimension " +
                              std::to_string(x.size()) + ", expected " +
                              std::to_string(state->domain.dimension()));
    }
    const Vector u = state->domain.normalize(x);
    return covariance_vector(state->spec, state->anchors_normalized, u).dot(state->weights);
  };
}

}  // namespace krigopt
