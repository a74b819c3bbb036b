// Command-line front end: campaign management (design / suggest / tell),
// benchmark runs, response-curve interpolation, and model diagnostics.
//
// Exit codes: 0 success; 2 usage, configuration, or data errors; 3 ask/tell
// protocol violations; 4 numerical degeneracies encountered mid-computation.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "krigopt/acquisition.hpp"
#include "krigopt/benchfn.hpp"
#include "krigopt/design.hpp"
#include "krigopt/diagnostics.hpp"
#include "krigopt/ego.hpp"
#include "krigopt/flowrate.hpp"
#include "krigopt/io.hpp"
#include "krigopt/kriging.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const json& require_key(const json& j, const std::string& key, const std::string& context) {
  if (!j.is_object() || !j.contains(key)) {
    throw krigopt::InvalidConfig(context + ": missing required key '" + key + "'");
  }
  return j.at(key);
}

krigopt::Vector vector_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty()) {
    throw krigopt::InvalidConfig(context + ": expected a non-empty numeric array");
  }
  krigopt::Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw krigopt::InvalidConfig(context + ": entry " + std::to_string(i) + " is not a number");
    }
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

krigopt::BoxDomain domain_from_json(const json& j, const std::string& context) {
  krigopt::BoxDomain domain;
  domain.lower = vector_from_json(require_key(j, "lower", context), context + ".lower");
  domain.upper = vector_from_json(require_key(j, "upper", context), context + ".upper");
  domain.validate();
  return domain;
}

krigopt::EgoConfig ego_config_from_json(const json& cfg) {
  krigopt::EgoConfig config;
  const json& budget = require_key(cfg, "budget_total", "config");
  if (!budget.is_number_integer()) {
    throw krigopt::InvalidConfig("config: budget_total must be an integer");
  }
  config.budget_total = budget.get<int>();
  config.initial_size = cfg.value("initial_size", 0);
  config.batch_size = cfg.value("batch_size", 1);
  config.liar = krigopt::liar_from_string(cfg.value("liar", std::string("cl_mixed")));
  config.family = krigopt::kernel_family_from_string(cfg.value("family", std::string("matern52")));
  config.seed = cfg.value("seed", std::uint64_t{0});
  config.refit_every = cfg.value("refit_every", 1);
  config.mle_starts = cfg.value("mle_starts", 10);
  config.mle_evals_per_start = cfg.value("mle_evals_per_start", 0);
  config.acq_starts = cfg.value("acq_starts", 20);
  config.acq_evals_per_start = cfg.value("acq_evals_per_start", 0);
  config.mc_draws = cfg.value("mc_draws", 10000);
  return config;
}

// Extracts columns x1..xd (and optionally y) from an evaluation table.
struct PointColumns {
  krigopt::Matrix points;
  krigopt::Vector values;  // empty when with_values is false
};

PointColumns extract_points(const krigopt::io::CsvTable& table, int dimension, bool with_values) {
  PointColumns out;
  out.points.resize(table.rows(), dimension);
  for (int j = 0; j < dimension; ++j) {
    const int col = table.column("x" + std::to_string(j + 1));
    out.points.col(j) = table.values.col(col);
  }
  if (with_values) {
    out.values = table.values.col(table.column("y"));
  }
  return out;
}

void save_state(const fs::path& path, const krigopt::OptimizationState& state) {
  krigopt::io::write_text_atomic(path, state.to_json().dump(2) + "\n");
}

krigopt::OptimizationState load_state(const fs::path& path) {
  return krigopt::OptimizationState::from_json(krigopt::io::read_json(path));
}

void write_campaign_outputs(const fs::path& dir, const krigopt::Matrix& points,
                            const krigopt::Vector& values, const krigopt::Vector& ei,
                            const json& extra_report) {
  krigopt::io::write_text_atomic(dir / "history.csv",
                                 krigopt::io::history_csv(points, values, ei));
  Eigen::Index best = 0;
  values.maxCoeff(&best);
  json report = extra_report;
  report["evaluations"] = static_cast<int>(values.size());
  report["best_value"] = values[best];
  report["best_point"] = json::array();
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    report["best_point"].push_back(points(best, j));
  }
  krigopt::io::write_json(dir / "report.json", report);
}

// ---------------------------------------------------------------------------
// Subcommand implementations.

struct DesignArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
};

int cmd_design(const DesignArgs& args) {
  json cfg = krigopt::io::read_json(args.config_path);
  const krigopt::BoxDomain domain =
      domain_from_json(require_key(cfg, "domain", "config"), "config.domain");
  krigopt::EgoConfig config = ego_config_from_json(cfg);
  if (args.seed.has_value()) {
    config.seed = *args.seed;
  }

  auto [state, design] = krigopt::OptimizationState::start(domain, config);
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  save_state(dir / "state.json", state);
  krigopt::io::write_text_atomic(dir / "design.csv", krigopt::io::design_csv(design.points));

  std::cout << "campaign started: " << design.size() << " initial points over "
            << domain.dimension() << " dimensions\n"
            << "design written to " << (dir / "design.csv").string() << "\n"
            << "evaluate each row, add a 'y' column, then run: krigopt tell\n";
  return 0;
}

struct SuggestArgs {
  std::string state_path;
  std::string out_path;
};

int cmd_suggest(const SuggestArgs& args) {
  krigopt::OptimizationState state = load_state(args.state_path);
  const krigopt::BatchProposal proposal = state.ask();
  save_state(args.state_path, state);

  const fs::path out = args.out_path.empty()
                           ? fs::path(args.state_path).parent_path() / "proposals.csv"
                           : fs::path(args.out_path);
  krigopt::io::write_text_atomic(out,
                                 krigopt::io::proposals_csv(proposal.points, proposal.ei));

  std::cout << "proposed " << proposal.points.rows() << " point(s) via "
            << krigopt::to_string(proposal.strategy) << "\n"
            << "max single-point EI: " << krigopt::io::format_double(proposal.ei.maxCoeff())
            << "\n";
  if (proposal.qei.has_value()) {
    std::cout << "batch qEI estimate: " << krigopt::io::format_double(proposal.qei->estimate)
              << " (std err " << krigopt::io::format_double(proposal.qei->std_error) << ")\n";
  }
  std::cout << "proposals written to " << out.string() << "\n";
  return 0;
}

struct TellArgs {
  std::string state_path;
  std::string evals_path;
};

int cmd_tell(const TellArgs& args) {
  krigopt::OptimizationState state = load_state(args.state_path);
  const krigopt::io::CsvTable table = krigopt::io::read_csv(args.evals_path);
  const PointColumns batch = extract_points(table, state.domain().dimension(), true);

  state.tell(batch.points, batch.values);
  save_state(args.state_path, state);

  const auto incumbent = state.incumbent();
  std::cout << "recorded " << batch.points.rows() << " evaluation(s); total "
            << state.evaluated_count() << "/" << state.config().budget_total << "\n"
            << "incumbent: " << krigopt::io::format_double(incumbent->value) << "\n";

  if (state.phase() == krigopt::Phase::finished) {
    const fs::path dir = fs::path(args.state_path).parent_path();
    write_campaign_outputs(dir, state.evaluated_points(), state.evaluated_values(),
                           state.evaluation_ei(), json::object());
    std::cout << "campaign finished; history and report written to " << dir.string() << "\n";
  } else {
    std::cout << "next: krigopt suggest --state " << args.state_path << "\n";
  }
  return 0;
}

struct InterpolateArgs {
  std::string points_path;
  std::string q_col = "q";
  std::string r_col = "r";
  bool insert_origin = false;
  std::vector<double> targets;
  std::string out_path;
};

int cmd_interpolate(const InterpolateArgs& args) {
  const krigopt::io::CsvTable table = krigopt::io::read_csv(args.points_path);
  const int qc = table.column(args.q_col);
  const int rc = table.column(args.r_col);

  const int extra = args.insert_origin ? 1 : 0;
  krigopt::Matrix points(table.rows() + extra, 2);
  if (args.insert_origin) {
    points.row(0) << 0.0, 0.0;
  }
  points.col(0).tail(table.rows()) = table.values.col(qc);
  points.col(1).tail(table.rows()) = table.values.col(rc);

  const krigopt::FlowCurve curve = krigopt::fit_quadratic(points);

  json report;
  report["a"] = curve.a;
  report["b"] = curve.b;
  report["c"] = curve.c;
  report["points"] = static_cast<int>(points.rows());
  report["max_residual"] = curve.max_residual();
  report["targets"] = json::array();
  for (double q : args.targets) {
    report["targets"].push_back({{"q", q}, {"r", krigopt::evaluate(curve, q)}});
  }

  std::cout << report.dump(2) << "\n";
  if (!args.out_path.empty()) {
    krigopt::io::write_json(args.out_path, report);
  }
  return 0;
}

struct DiagnoseArgs {
  std::string evals_path;
  std::string config_path;
  std::string out_path;
};

int cmd_diagnose(const DiagnoseArgs& args) {
  json cfg = json::object();
  if (!args.config_path.empty()) {
    cfg = krigopt::io::read_json(args.config_path);
  }
  std::optional<krigopt::BoxDomain> domain;
  if (cfg.contains("domain")) {
    domain = domain_from_json(cfg.at("domain"), "config.domain");
  }
  const krigopt::KernelFamily family =
      krigopt::kernel_family_from_string(cfg.value("family", std::string("matern52")));
  const std::uint64_t seed = cfg.value("seed", std::uint64_t{0});
  krigopt::MleOptions mle;
  mle.starts = cfg.value("mle_starts", 10);
  mle.evals_per_start = cfg.value("mle_evals_per_start", 0);

  const krigopt::io::CsvTable table = krigopt::io::read_csv(args.evals_path);
  int dimension = 0;
  while (true) {
    bool found = false;
    for (const std::string& name : table.header) {
      if (name == "x" + std::to_string(dimension + 1)) {
        found = true;
        break;
      }
    }
    if (!found) {
      break;
    }
    ++dimension;
  }
  if (dimension == 0) {
    throw krigopt::InvalidParameter(args.evals_path + ": no x1..xd columns found");
  }

  const PointColumns data = extract_points(table, dimension, true);
  const krigopt::TrainingSet training{data.points, data.values};

  const krigopt::KernelSpec spec = krigopt::estimate_params(
      training, family, krigopt::Trend::estimate(), seed, domain, mle);
  const krigopt::GpModel model = krigopt::fit(training, spec, krigopt::Trend::estimate(), domain);
  const krigopt::LooVectors loo = model.leave_one_out();
  const krigopt::MetricsReport metrics = krigopt::loo_metrics(training.y, loo.mean, loo.sd);
  const krigopt::LinearFit baseline = krigopt::fit_linear_baseline(training.x, training.y);

  const double kriging_loo_rmse = metrics.rmse;
  const double linear_rmse = baseline.rmse(training.y);

  json report;
  report["n"] = training.size();
  report["dimension"] = dimension;
  report["family"] = krigopt::to_string(spec.family);
  report["lengthscales"] = json::array();
  for (int j = 0; j < spec.dimension(); ++j) {
    report["lengthscales"].push_back(spec.lengthscales[j]);
  }
  report["process_variance"] = spec.process_variance;
  report["nugget"] = model.nugget();
  report["trend_mean"] = model.trend_mean();
  report["metrics"] = {{"r_squared", metrics.r_squared},
                       {"rmse", metrics.rmse},
                       {"rma", metrics.rma},
                       {"cr95", metrics.cr95}};
  report["linear_baseline_rmse"] = linear_rmse;
  report["beats_linear_baseline"] = kriging_loo_rmse <= linear_rmse;

  std::cout << report.dump(2) << "\n";
  if (!args.out_path.empty()) {
    krigopt::io::write_json(args.out_path, report);
  }
  return 0;
}

struct RunBenchArgs {
  std::string objective;
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
};

int cmd_run_bench(const RunBenchArgs& args) {
  const krigopt::ObjectiveSpec& objective = krigopt::find_objective(args.objective);
  json cfg = krigopt::io::read_json(args.config_path);
  krigopt::EgoConfig config = ego_config_from_json(cfg);
  if (args.seed.has_value()) {
    config.seed = *args.seed;
  }

  krigopt::BoxDomain domain = objective.domain;
  if (cfg.contains("domain")) {
    domain = domain_from_json(cfg.at("domain"), "config.domain");
    if (domain.dimension() != objective.domain.dimension()) {
      throw krigopt::InvalidConfig("config.domain dimension does not match objective '" +
                                   objective.name + "'");
    }
  }

  const int initial =
      config.initial_size > 0 ? config.initial_size : config.budget_total / 2;

  krigopt::Matrix points;
  krigopt::Vector raw_values;
  krigopt::Vector ei;
  if (initial == config.budget_total) {
    // Degenerate budget: the whole allowance goes to the space-filling
    // design, so the run is a pure Latin hypercube search.
    if (config.budget_total < 2) {
      throw krigopt::InvalidConfig("budget_total must be at least 2");
    }
    const krigopt::DesignMatrix design = krigopt::lhs(
        config.budget_total, domain, krigopt::derive_seed(config.seed, krigopt::kDesignSeedTag));
    points = design.points;
    raw_values.resize(points.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      raw_values[i] = objective.evaluate(points.row(i).transpose());
    }
    ei = krigopt::Vector::Constant(points.rows(), std::numeric_limits<double>::quiet_NaN());
  } else {
    // The campaign maximizes, the registry functions are minimization
    // benchmarks: run on the negated objective and report raw values.
    const krigopt::CampaignResult result = krigopt::run_closed_loop(
        [&](const krigopt::Vector& x) { return -objective.evaluate(x); }, domain, config);
    points = result.points;
    raw_values = -result.values;
    ei = result.proposal_ei;
  }

  Eigen::Index best = 0;
  raw_values.minCoeff(&best);

  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  krigopt::io::write_text_atomic(dir / "history.csv",
                                 krigopt::io::history_csv(points, raw_values, ei));
  json report;
  report["objective"] = objective.name;
  report["evaluations"] = static_cast<int>(raw_values.size());
  report["best_value"] = raw_values[best];
  report["best_point"] = json::array();
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    report["best_point"].push_back(points(best, j));
  }
  report["optimum_value"] = objective.optimum_value;
  report["gap"] = raw_values[best] - objective.optimum_value;
  krigopt::io::write_json(dir / "report.json", report);

  std::cout << "objective " << objective.name << ": best "
            << krigopt::io::format_double(raw_values[best]) << " after " << raw_values.size()
            << " evaluations (known optimum "
            << krigopt::io::format_double(objective.optimum_value) << ")\n"
            << "outputs written to " << dir.string() << "\n";
  return 0;
}

int run_guarded(const std::function<int()>& action) {
  try {
    return action();
  } catch (const krigopt::ProtocolError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const krigopt::NotPositiveDefinite& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const krigopt::DegenerateDesign& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const krigopt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kriging-guided sequential design and optimization"};
  app.require_subcommand(1);

  std::function<int()> action;

  DesignArgs design_args;
  std::uint64_t design_seed = 0;
  CLI::App* design = app.add_subcommand(
      "design", "Start a campaign: draw the initial space-filling design");
  design->add_option("--config", design_args.config_path, "campaign configuration (JSON)")
      ->required();
  design->add_option("--out", design_args.out_dir, "output directory (default: .)");
  design->add_option("--seed", design_seed, "override the configured seed");
  design->callback([&]() {
    if (design->count("--seed") > 0) {
      design_args.seed = design_seed;
    }
    action = [&]() { return cmd_design(design_args); };
  });

  SuggestArgs suggest_args;
  CLI::App* suggest =
      app.add_subcommand("suggest", "Propose the next evaluation batch from the model");
  suggest->add_option("--state", suggest_args.state_path, "campaign state file")->required();
  suggest->add_option("--out", suggest_args.out_path,
                      "proposals CSV (default: proposals.csv beside the state)");
  suggest->callback([&]() { action = [&]() { return cmd_suggest(suggest_args); }; });

  TellArgs tell_args;
  CLI::App* tell = app.add_subcommand("tell", "Record responses for the pending request");
  tell->add_option("--state", tell_args.state_path, "campaign state file")->required();
  tell->add_option("--evals", tell_args.evals_path, "CSV with columns x1..xd,y")->required();
  tell->callback([&]() { action = [&]() { return cmd_tell(tell_args); }; });

  InterpolateArgs interp_args;
  CLI::App* interpolate = app.add_subcommand(
      "interpolate", "Fit the quadratic response curve through flow-rate points");
  interpolate->add_option("--points", interp_args.points_path, "CSV with flow-rate points")
      ->required();
  interpolate->add_option("--q-col", interp_args.q_col, "flow-rate column name (default: q)");
  interpolate->add_option("--r-col", interp_args.r_col, "response column name (default: r)");
  interpolate->add_flag("--insert-origin", interp_args.insert_origin,
                        "prepend the (0, 0) operating point");
  interpolate->add_option("--target", interp_args.targets,
                          "flow rate(s) at which to evaluate the curve");
  interpolate->add_option("--out", interp_args.out_path, "also write the report JSON here");
  interpolate->callback([&]() { action = [&]() { return cmd_interpolate(interp_args); }; });

  DiagnoseArgs diagnose_args;
  CLI::App* diagnose = app.add_subcommand(
      "diagnose", "Fit a model to evaluations and report cross-validation metrics");
  diagnose->add_option("--evals", diagnose_args.evals_path, "CSV with columns x1..xd,y")
      ->required();
  diagnose->add_option("--config", diagnose_args.config_path,
                       "optional JSON with domain/family/seed/mle settings");
  diagnose->add_option("--out", diagnose_args.out_path, "also write the report JSON here");
  diagnose->callback([&]() { action = [&]() { return cmd_diagnose(diagnose_args); }; });

  RunBenchArgs bench_args;
  std::uint64_t bench_seed = 0;
  CLI::App* bench = app.add_subcommand(
      "run-bench", "Run a full closed-loop campaign on a named benchmark objective");
  bench->add_option("--objective", bench_args.objective, "objective name (branin, hartmann6)")
      ->required();
  bench->add_option("--config", bench_args.config_path, "campaign configuration (JSON)")
      ->required();
  bench->add_option("--out", bench_args.out_dir, "output directory (default: .)");
  bench->add_option("--seed", bench_seed, "override the configured seed");
  bench->callback([&]() {
    if (bench->count("--seed") > 0) {
      bench_args.seed = bench_seed;
    }
    action = [&]() { return cmd_run_bench(bench_args); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  return run_guarded(action);
}
