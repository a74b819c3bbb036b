// Python bindings for the core operations: model fitting and prediction,
// acquisition, batch proposals, the ask/tell campaign driver, diagnostics,
// and the benchmark/response-curve helpers.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "krigopt/acquisition.hpp"
#include "krigopt/benchfn.hpp"
#include "krigopt/design.hpp"
#include "krigopt/diagnostics.hpp"
#include "krigopt/ego.hpp"
#include "krigopt/flowrate.hpp"
#include "krigopt/kriging.hpp"

namespace py = pybind11;
using namespace krigopt;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Kriging surrogates with expected-improvement campaign management";

  // Exceptions: the base class first so the specific translators registered
  // afterwards take precedence.
  // Base registered first so derived translators (registered later) win.
  auto& base_error = py::register_exception<Error>(m, "KrigoptError");
  py::register_exception<ProtocolError>(m, "KrigoptProtocolError", base_error.ptr());
  py::register_exception<DegenerateDesign>(m, "KrigoptDegenerateDesign", base_error.ptr());
  py::register_exception<NotPositiveDefinite>(m, "KrigoptNotPositiveDefinite", base_error.ptr());

  py::enum_<KernelFamily>(m, "KernelFamily")
      .value("matern52", KernelFamily::matern52)
      .value("gaussian", KernelFamily::gaussian)
      .value("exponential", KernelFamily::exponential);

  py::class_<KernelSpec>(m, "KernelSpec")
      .def(py::init([](KernelFamily family, const Vector& lengthscales, double process_variance) {
             KernelSpec spec;
             spec.family = family;
             spec.lengthscales = lengthscales;
             spec.process_variance = process_variance;
             spec.validate();
             return spec;
           }),
           py::arg("family"), py::arg("lengthscales"), py::arg("process_variance") = 1.0)
      .def_readonly("family", &KernelSpec::family)
      .def_readonly("lengthscales", &KernelSpec::lengthscales)
      .def_readonly("process_variance", &KernelSpec::process_variance)
      .def("dimension", &KernelSpec::dimension);

  py::class_<BoxDomain>(m, "BoxDomain")
      .def(py::init([](const Vector& lower, const Vector& upper) {
             BoxDomain box{lower, upper};
             box.validate();
             return box;
           }),
           py::arg("lower"), py::arg("upper"))
      .def_readonly("lower", &BoxDomain::lower)
      .def_readonly("upper", &BoxDomain::upper)
      .def("dimension", &BoxDomain::dimension)
      .def("contains", &BoxDomain::contains, py::arg("x"), py::arg("tol") = 0.0);

  py::class_<DesignMatrix>(m, "DesignMatrix")
      .def_readonly("points", &DesignMatrix::points)
      .def_readonly("domain", &DesignMatrix::domain);

  m.def("lhs", &lhs, py::arg("n"), py::arg("domain"), py::arg("seed"),
        "Latin hypercube sample, deterministic in seed");
  m.def("maximin_improve", &maximin_improve, py::arg("design"), py::arg("iterations"),
        py::arg("seed"));
  m.def("min_pairwise_distance", &min_pairwise_distance, py::arg("points"), py::arg("domain"));

  py::class_<TrainingSet>(m, "TrainingSet")
      .def(py::init([](const Matrix& x, const Vector& y) { return TrainingSet{x, y}; }),
           py::arg("x"), py::arg("y"))
      .def_readonly("x", &TrainingSet::x)
      .def_readonly("y", &TrainingSet::y);

  py::class_<Trend>(m, "Trend")
      .def_static("known", &Trend::known, py::arg("mean"))
      .def_static("estimate", &Trend::estimate);

  py::class_<PredictiveDistribution>(m, "PredictiveDistribution")
      .def_readonly("mean", &PredictiveDistribution::mean)
      .def_readonly("variance", &PredictiveDistribution::variance)
      .def("sd", &PredictiveDistribution::sd);

  py::class_<LooVectors>(m, "LooVectors")
      .def_readonly("mean", &LooVectors::mean)
      .def_readonly("sd", &LooVectors::sd);

  py::class_<GpModel>(m, "GpModel")
      .def_property_readonly("spec", &GpModel::spec)
      .def_property_readonly("trend_mean", &GpModel::trend_mean)
      .def_property_readonly("nugget", &GpModel::nugget)
      .def("weights", &GpModel::weights)
      .def("predict", &GpModel::predict, py::arg("x0"))
      .def("leave_one_out", &GpModel::leave_one_out)
      .def("posterior_cov", &GpModel::posterior_cov, py::arg("x_new"))
      .def("posterior_sample", &GpModel::posterior_sample, py::arg("x_new"), py::arg("draws"),
           py::arg("seed"));

  m.def(
      "fit",
      [](const TrainingSet& training, const KernelSpec& spec, const Trend& trend,
         const std::optional<BoxDomain>& domain) { return fit(training, spec, trend, domain); },
      py::arg("training"), py::arg("spec"), py::arg("trend"), py::arg("domain") = std::nullopt);
  m.def(
      "neg_log_likelihood",
      [](const TrainingSet& training, const KernelSpec& spec, const Trend& trend,
         const std::optional<BoxDomain>& domain) {
        return neg_log_likelihood(training, spec, trend, domain);
      },
      py::arg("training"), py::arg("spec"), py::arg("trend"), py::arg("domain") = std::nullopt);
  m.def(
      "estimate_params",
      [](const TrainingSet& training, KernelFamily family, const Trend& trend, std::uint64_t seed,
         const std::optional<BoxDomain>& domain, int starts, int evals_per_start) {
        MleOptions options;
        options.starts = starts;
        options.evals_per_start = evals_per_start;
        return estimate_params(training, family, trend, seed, domain, options);
      },
      py::arg("training"), py::arg("family"), py::arg("trend"), py::arg("seed"),
      py::arg("domain") = std::nullopt, py::arg("starts") = 10, py::arg("evals_per_start") = 0);

  py::class_<Incumbent>(m, "Incumbent")
      .def(py::init([](double value) { return Incumbent{value}; }), py::arg("value"))
      .def_readonly("value", &Incumbent::value);

  py::class_<QeiEstimate>(m, "QeiEstimate")
      .def_readonly("estimate", &QeiEstimate::estimate)
      .def_readonly("std_error", &QeiEstimate::std_error);

  py::class_<AcquisitionMaximum>(m, "AcquisitionMaximum")
      .def_readonly("point", &AcquisitionMaximum::point)
      .def_readonly("ei", &AcquisitionMaximum::ei);

  py::enum_<LiarKind>(m, "LiarKind")
      .value("cl_min", LiarKind::cl_min)
      .value("cl_max", LiarKind::cl_max)
      .value("cl_mean", LiarKind::cl_mean)
      .value("cl_mixed", LiarKind::cl_mixed);

  py::class_<BatchProposal>(m, "BatchProposal")
      .def_readonly("points", &BatchProposal::points)
      .def_readonly("ei", &BatchProposal::ei)
      .def_readonly("strategy", &BatchProposal::strategy)
      .def_readonly("qei", &BatchProposal::qei);

  m.def("expected_improvement", &expected_improvement, py::arg("model"), py::arg("x"),
        py::arg("incumbent"));
  m.def("qei_mc", &qei_mc, py::arg("model"), py::arg("points"), py::arg("incumbent"),
        py::arg("draws"), py::arg("seed"));
  m.def(
      "maximize_acquisition",
      [](const GpModel& model, const Incumbent& incumbent, const BoxDomain& box,
         std::uint64_t seed, int starts, int evals_per_start) {
        AcquisitionOptions options;
        options.starts = starts;
        options.evals_per_start = evals_per_start;
        return maximize_acquisition(model, incumbent, box, seed, options);
      },
      py::arg("model"), py::arg("incumbent"), py::arg("box"), py::arg("seed"),
      py::arg("starts") = 20, py::arg("evals_per_start") = 0);
  m.def(
      "propose_batch_cl",
      [](const GpModel& model, const Incumbent& incumbent, const BoxDomain& box, int batch_size,
         LiarKind kind, std::uint64_t seed, int qei_draws) {
        BatchOptions options;
        options.qei_draws = qei_draws;
        return propose_batch_cl(model, incumbent, box, batch_size, kind, seed, options);
      },
      py::arg("model"), py::arg("incumbent"), py::arg("box"), py::arg("batch_size"),
      py::arg("kind"), py::arg("seed"), py::arg("qei_draws") = 10000);

  py::enum_<Phase>(m, "Phase")
      .value("awaiting_initial", Phase::awaiting_initial)
      .value("ready", Phase::ready)
      .value("awaiting_batch", Phase::awaiting_batch)
      .value("finished", Phase::finished);

  py::class_<EgoConfig>(m, "EgoConfig")
      .def(py::init<>())
      .def_readwrite("budget_total", &EgoConfig::budget_total)
      .def_readwrite("initial_size", &EgoConfig::initial_size)
      .def_readwrite("batch_size", &EgoConfig::batch_size)
      .def_readwrite("liar", &EgoConfig::liar)
      .def_readwrite("family", &EgoConfig::family)
      .def_readwrite("seed", &EgoConfig::seed)
      .def_readwrite("refit_every", &EgoConfig::refit_every)
      .def_readwrite("mle_starts", &EgoConfig::mle_starts)
      .def_readwrite("mle_evals_per_start", &EgoConfig::mle_evals_per_start)
      .def_readwrite("acq_starts", &EgoConfig::acq_starts)
      .def_readwrite("acq_evals_per_start", &EgoConfig::acq_evals_per_start)
      .def_readwrite("mc_draws", &EgoConfig::mc_draws);

  py::class_<CampaignResult>(m, "CampaignResult")
      .def_readonly("best_point", &CampaignResult::best_point)
      .def_readonly("best_value", &CampaignResult::best_value)
      .def_readonly("points", &CampaignResult::points)
      .def_readonly("values", &CampaignResult::values)
      .def_readonly("proposal_ei", &CampaignResult::proposal_ei);

  py::class_<OptimizationState>(m, "OptimizationState")
      .def_static("start", &OptimizationState::start, py::arg("domain"), py::arg("config"))
      .def_property_readonly("phase", &OptimizationState::phase)
      .def_property_readonly("evaluated_count", &OptimizationState::evaluated_count)
      .def_property_readonly("remaining_budget", &OptimizationState::remaining_budget)
      .def_property_readonly("pending_points", &OptimizationState::pending_points)
      .def("ask", &OptimizationState::ask)
      .def("tell", &OptimizationState::tell, py::arg("points"), py::arg("values"))
      .def("result", &OptimizationState::result)
      .def("to_json", [](const OptimizationState& state) { return state.to_json().dump(2); })
      .def_static("from_json", [](const std::string& text) {
        return OptimizationState::from_json(nlohmann::json::parse(text));
      });

  m.def("run_closed_loop", &run_closed_loop, py::arg("objective"), py::arg("domain"),
        py::arg("config"));

  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("r_squared", &MetricsReport::r_squared)
      .def_readonly("rmse", &MetricsReport::rmse)
      .def_readonly("rma", &MetricsReport::rma)
      .def_readonly("cr95", &MetricsReport::cr95);

  m.def("loo_metrics", &loo_metrics, py::arg("y"), py::arg("yhat"), py::arg("sd"));
  m.def("conditional_correlation", &conditional_correlation, py::arg("model"), py::arg("points"));

  py::class_<EiDistribution>(m, "EiDistribution")
      .def_readonly("samples", &EiDistribution::samples)
      .def_readonly("a_posteriori", &EiDistribution::a_posteriori);

  m.def("ei_posterior_distribution", &ei_posterior_distribution, py::arg("model"),
        py::arg("batch"), py::arg("reference_best"), py::arg("draws"), py::arg("seed"));

  py::class_<LinearFit>(m, "LinearFit")
      .def_readonly("coefficients", &LinearFit::coefficients)
      .def_readonly("fitted", &LinearFit::fitted)
      .def("rmse", &LinearFit::rmse, py::arg("y"));

  m.def("fit_linear_baseline", &fit_linear_baseline, py::arg("x"), py::arg("y"));

  py::class_<FlowCurve>(m, "FlowCurve")
      .def_readonly("a", &FlowCurve::a)
      .def_readonly("b", &FlowCurve::b)
      .def_readonly("c", &FlowCurve::c)
      .def_readonly("fitted", &FlowCurve::fitted)
      .def_readonly("residuals", &FlowCurve::residuals)
      .def("max_residual", &FlowCurve::max_residual);

  m.def("fit_quadratic", &fit_quadratic, py::arg("points"));
  m.def("evaluate_curve", [](const FlowCurve& curve, double q) { return evaluate(curve, q); },
        py::arg("curve"), py::arg("q"));
  m.def("efficiency_from", &efficiency_from, py::arg("flow_rate"), py::arg("pressure_rise"),
        py::arg("torque"), py::arg("angular_speed"));

  m.def("branin", &branin, py::arg("x"));
  m.def("hartmann6", &hartmann6, py::arg("x"));
  m.def("synthetic_gp_objective", &synthetic_gp_objective, py::arg("spec"), py::arg("domain"),
        py::arg("anchor_count"), py::arg("seed"));
}
