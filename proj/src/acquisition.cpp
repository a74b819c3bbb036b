#include "krigopt/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "krigopt/optim.hpp"

namespace krigopt {

namespace {

void check_incumbent(const Incumbent& incumbent) {
  if (!std::isfinite(incumbent.value)) {
    throw NonFiniteValue("incumbent value must be finite");
  }
}

void check_box_against_model(const GpModel& model, const BoxDomain& box) {
  box.validate();
  if (box.dimension() != model.training().dimension()) {
    throw DimensionMismatch("search box dimension " + std::to_string(box.dimension()) +
                            " != model dimension " +
                            std::to_string(model.training().dimension()));
  }
}

// Chebyshev distance in normalized coordinates below which two inputs are
// treated as the same point.
constexpr double kCoincidentTol = 1e-9;

bool coincides_with_any(const Vector& candidate_normalized,
                        const std::vector<Vector>& existing_normalized) {
  for (const Vector& row : existing_normalized) {
    if ((candidate_normalized - row).cwiseAbs().maxCoeff() <= kCoincidentTol) {
      return true;
    }
  }
  return false;
}

}  // namespace

double expected_improvement(const GpModel& model, const Vector& x, const Incumbent& incumbent) {
  check_incumbent(incumbent);
  const PredictiveDistribution p = model.predict(x);
  const double diff = p.mean - incumbent.value;
  const double sd = p.sd();
  const double guard = 1e-12 * std::sqrt(model.spec().process_variance);
  if (sd <= guard) {
    return std::max(diff, 0.0);
  }
  const double u = diff / sd;
  return std::max(0.0, diff * std_normal_cdf(u) + sd * std_normal_pdf(u));
}

QeiEstimate qei_mc(const GpModel& model, const Matrix& points, const Incumbent& incumbent,
                   int draws, std::uint64_t seed) {
  check_incumbent(incumbent);
  if (draws < 2) {
    throw InvalidParameter("qei_mc: at least 2 draws required for a standard error");
  }
  const Matrix samples = model.posterior_sample(points, draws, seed);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (Eigen::Index k = 0; k < samples.rows(); ++k) {
    const double improvement = std::max(0.0, samples.row(k).maxCoeff() - incumbent.value);
    sum += improvement;
    sum_sq += improvement * improvement;
  }
  const double n = static_cast<double>(draws);
  QeiEstimate out;
  out.estimate = sum / n;
  const double var = std::max(0.0, (sum_sq - n * out.estimate * out.estimate) / (n - 1.0));
  out.std_error = std::sqrt(var / n);
  return out;
}

AcquisitionMaximum maximize_acquisition(const GpModel& model, const Incumbent& incumbent,
                                        const BoxDomain& box, std::uint64_t seed,
                                        const AcquisitionOptions& options) {
  check_incumbent(incumbent);
  check_box_against_model(model, box);
  if (options.starts < 1) {
    throw InvalidParameter("maximize_acquisition: starts must be positive");
  }
  if (options.evals_per_start < 0) {
    throw InvalidParameter("maximize_acquisition: evals_per_start must be non-negative");
  }

  const int d = box.dimension();
  const auto objective = [&](const Vector& x) {
    return -expected_improvement(model, x, incumbent);
  };

  NelderMeadOptions nm;
  nm.max_evals = options.evals_per_start > 0 ? options.evals_per_start : 200 * d;
  nm.initial_step = 0.05;

  const DesignMatrix starts = lhs(options.starts, box, seed);
  AcquisitionMaximum best;
  best.point = box.clamp(starts.points.row(0).transpose());
  best.ei = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts.size(); ++s) {
    const NelderMeadResult run =
        nelder_mead_box(objective, starts.points.row(s).transpose(), box, nm);
    const double ei = std::isfinite(run.value) ? -run.value : 0.0;
    if (ei > best.ei) {
      best.ei = ei;
      best.point = run.x;
    }
  }
  best.ei = std::max(0.0, best.ei);
  return best;
}

std::string to_string(LiarKind kind) {
  switch (kind) {
    case LiarKind::cl_min:
      return "cl_min";
    case LiarKind::cl_max:
      return "cl_max";
    case LiarKind::cl_mean:
      return "cl_mean";
    case LiarKind::cl_mixed:
      return "cl_mixed";
  }
  throw InvalidParameter("to_string: unknown liar kind");
}

LiarKind liar_from_string(const std::string& name) {
  std::string key = name;
  if (key.rfind("cl_", 0) == 0) {
    key = key.substr(3);
  }
  if (key == "min") return LiarKind::cl_min;
  if (key == "max") return LiarKind::cl_max;
  if (key == "mean") return LiarKind::cl_mean;
  if (key == "mixed") return LiarKind::cl_mixed;
  throw InvalidParameter("unknown liar strategy '" + name +
                         "' (expected cl_min, cl_max, cl_mean, or cl_mixed)");
}

namespace {

// One constant-liar sweep with a fixed (non-mixed) strategy.
BatchProposal run_constant_liar(const GpModel& model, const Incumbent& incumbent,
                                const BoxDomain& box, int batch_size, LiarKind kind,
                                std::uint64_t seed, const BatchOptions& options) {
  const int d = box.dimension();
  const Vector& y = model.training().y;
  const double fixed_lie = kind == LiarKind::cl_min   ? y.minCoeff()
                           : kind == LiarKind::cl_max ? y.maxCoeff()
                                                      : 0.0;

  BatchProposal out;
  out.points.resize(batch_size, d);
  out.ei.resize(batch_size);
  out.strategy = kind;

  std::vector<Vector> taken;  // normalized coordinates of training + chosen points
  taken.reserve(model.training().size() + batch_size);
  for (int i = 0; i < model.training().size(); ++i) {
    taken.push_back(model.normalizer().apply(Vector(model.training().x.row(i).transpose())));
  }

  TrainingSet working = model.training();
  GpModel current = model;
  double effective_incumbent = incumbent.value;

  for (int i = 0; i < batch_size; ++i) {
    const AcquisitionMaximum found =
        maximize_acquisition(current, Incumbent{effective_incumbent}, box,
                             derive_seed(seed, static_cast<std::uint64_t>(i)),
                             options.acquisition);
    Vector point = found.point;
    Vector point_n = model.normalizer().apply(point);
    if (coincides_with_any(point_n, taken)) {
      // Nudge deterministically toward the box interior and retry once.
      const Vector width = box.width();
      for (int j = 0; j < d; ++j) {
        const double step = 1e-6 * width[j];
        point[j] = (point[j] + step <= box.upper[j]) ? point[j] + step : point[j] - step;
      }
      point = box.clamp(point);
      point_n = model.normalizer().apply(point);
      if (coincides_with_any(point_n, taken)) {
        throw DegenerateDesign("propose_batch_cl: acquisition collapsed onto an already "
                               "selected point and could not be separated");
      }
    }
    out.points.row(i) = point.transpose();
    out.ei[i] = expected_improvement(current, point, Incumbent{effective_incumbent});
    taken.push_back(point_n);

    if (i + 1 < batch_size) {
      const double lie =
          kind == LiarKind::cl_mean ? current.predict(point).mean : fixed_lie;
      working.x.conservativeResize(working.x.rows() + 1, Eigen::NoChange);
      working.x.row(working.x.rows() - 1) = point.transpose();
      working.y.conservativeResize(working.y.size() + 1);
      working.y[working.y.size() - 1] = lie;
      effective_incumbent = std::max(effective_incumbent, lie);
      current = refit_with(model, working);
    }
  }
  return out;
}

}  // namespace

BatchProposal propose_batch_cl(const GpModel& model, const Incumbent& incumbent,
                               const BoxDomain& box, int batch_size, LiarKind kind,
                               std::uint64_t seed, const BatchOptions& options) {
  check_incumbent(incumbent);
  check_box_against_model(model, box);
  if (batch_size < 1) {
    throw InvalidParameter("propose_batch_cl: batch size must be positive, got " +
                           std::to_string(batch_size));
  }

  if (kind != LiarKind::cl_mixed) {
    return run_constant_liar(model, incumbent, box, batch_size, kind, seed, options);
  }

  // Mixed strategy: build both fixed-lie batches with identical inner seeds,
  // then keep the one whose Monte Carlo joint EI (common random numbers) is
  // larger.
  BatchProposal low = run_constant_liar(model, incumbent, box, batch_size, LiarKind::cl_min,
                                        seed, options);
  BatchProposal high = run_constant_liar(model, incumbent, box, batch_size, LiarKind::cl_max,
                                         seed, options);
  const std::uint64_t qei_seed = derive_seed(seed, 0x71u);
  const QeiEstimate q_low = qei_mc(model, low.points, incumbent, options.qei_draws, qei_seed);
  const QeiEstimate q_high = qei_mc(model, high.points, incumbent, options.qei_draws, qei_seed);

  BatchProposal winner = q_high.estimate > q_low.estimate ? std::move(high) : std::move(low);
  winner.strategy = LiarKind::cl_mixed;
  winner.qei = q_high.estimate > q_low.estimate ? q_high : q_low;
  return winner;
}

}  // namespace krigopt
