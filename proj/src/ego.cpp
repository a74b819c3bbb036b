#include "krigopt/ego.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace krigopt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Seed-derivation tags: keep the per-purpose substreams disjoint.
constexpr std::uint64_t kMleTagBase = 0x1000u;
constexpr std::uint64_t kAcqTagBase = 0x2000u;

double population_variance(const Vector& y) {
  const double mean = y.mean();
  return (y.array() - mean).square().sum() / static_cast<double>(y.size());
}

nlohmann::json json_from_vector(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(v[i]);
  }
  return arr;
}

nlohmann::json json_from_matrix(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows.push_back(json_from_vector(m.row(i).transpose()));
  }
  return rows;
}

double double_from_json(const nlohmann::json& j) {
  if (j.is_null()) {
    return kNaN;
  }
  return j.get<double>();
}

Vector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) {
    throw InvalidConfig("state: expected a numeric array");
  }
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = double_from_json(j[i]);
  }
  return v;
}

Matrix matrix_from_json(const nlohmann::json& j, Eigen::Index expected_cols) {
  if (!j.is_array()) {
    throw InvalidConfig("state: expected an array of rows");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Matrix m(rows, expected_cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Vector row = vector_from_json(j[static_cast<std::size_t>(i)]);
    if (row.size() != expected_cols) {
      throw InvalidConfig("state: row " + std::to_string(i) + " has " +
                          std::to_string(row.size()) + " entries, expected " +
                          std::to_string(expected_cols));
    }
    m.row(i) = row.transpose();
  }
  return m;
}

}  // namespace

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::awaiting_initial:
      return "awaiting_initial";
    case Phase::ready:
      return "ready";
    case Phase::awaiting_batch:
      return "awaiting_batch";
    case Phase::finished:
      return "finished";
  }
  throw InvalidParameter("to_string: unknown phase");
}

Phase phase_from_string(const std::string& name) {
  if (name == "awaiting_initial") return Phase::awaiting_initial;
  if (name == "ready") return Phase::ready;
  if (name == "awaiting_batch") return Phase::awaiting_batch;
  if (name == "finished") return Phase::finished;
  throw InvalidParameter("unknown phase '" + name + "'");
}

EgoConfig EgoConfig::resolved(int dimension) const {
  if (dimension < 1) {
    throw InvalidConfig("campaign dimension must be positive");
  }
  EgoConfig out = *this;
  if (out.budget_total < 3) {
    throw InvalidConfig("budget_total must be at least 3, got " +
                        std::to_string(out.budget_total));
  }
  if (out.initial_size == 0) {
    out.initial_size = out.budget_total / 2;
  }
  if (out.initial_size < 2) {
    throw InvalidConfig("initial_size must be at least 2, got " +
                        std::to_string(out.initial_size));
  }
  if (out.initial_size >= out.budget_total) {
    throw InvalidConfig("initial_size (" + std::to_string(out.initial_size) +
                        ") must leave budget for adaptive evaluations (budget_total " +
                        std::to_string(out.budget_total) + ")");
  }
  if (out.batch_size < 1) {
    throw InvalidConfig("batch_size must be positive");
  }
  if (out.refit_every < 1) {
    throw InvalidConfig("refit_every must be positive");
  }
  if (out.mle_starts < 1 || out.acq_starts < 1) {
    throw InvalidConfig("mle_starts and acq_starts must be positive");
  }
  if (out.mle_evals_per_start < 0 || out.acq_evals_per_start < 0) {
    throw InvalidConfig("per-start evaluation budgets must be non-negative");
  }
  if (out.mc_draws < 2) {
    throw InvalidConfig("mc_draws must be at least 2");
  }
  return out;
}

std::pair<OptimizationState, DesignMatrix> OptimizationState::start(const BoxDomain& domain,
                                                                    const EgoConfig& config) {
  domain.validate();
  const EgoConfig resolved = config.resolved(domain.dimension());

  const DesignMatrix design =
      lhs(resolved.initial_size, domain, derive_seed(resolved.seed, kDesignSeedTag));

  OptimizationState state;
  state.domain_ = domain;
  state.config_ = resolved;
  state.phase_ = Phase::awaiting_initial;
  state.evaluated_points_.resize(0, domain.dimension());
  state.evaluated_values_.resize(0);
  state.evaluation_ei_.resize(0);
  state.pending_points_ = design.points;
  state.pending_ei_ = Vector::Constant(design.size(), kNaN);
  state.pending_is_initial_ = true;
  return {std::move(state), design};
}

std::optional<Incumbent> OptimizationState::incumbent() const {
  if (evaluated_count() == 0) {
    return std::nullopt;
  }
  return Incumbent{evaluated_values_.maxCoeff()};
}

void OptimizationState::refresh_model() {
  const TrainingSet training{evaluated_points_, evaluated_values_};
  const bool mle_due = !last_spec_.has_value() || (ask_count_ % config_.refit_every) == 0;
  if (mle_due) {
    try {
      MleOptions mle;
      mle.starts = config_.mle_starts;
      mle.evals_per_start = config_.mle_evals_per_start;
      const KernelSpec spec = estimate_params(
          training, config_.family, Trend::estimate(),
          derive_seed(config_.seed, kMleTagBase + static_cast<std::uint64_t>(ask_count_)),
          domain_, mle);
      model_ = fit(training, spec, Trend::estimate(), domain_);
    } catch (const DegenerateDesign&) {
      // Near-constant responses give the likelihood nothing to work with;
      // keep the campaign alive with fixed mid-range hyperparameters.
      KernelSpec spec;
      spec.family = config_.family;
      spec.lengthscales = Vector::Constant(domain_.dimension(), 0.5);
      const double var_y = population_variance(evaluated_values_);
      spec.process_variance = var_y > 0.0 ? var_y : 1.0;
      model_ = fit(training, spec, Trend::estimate(), domain_);
    }
  } else {
    model_ = fit(training, *last_spec_, Trend::estimate(), domain_);
  }
  last_spec_ = model_->spec();
}

BatchProposal OptimizationState::ask() {
  switch (phase_) {
    case Phase::awaiting_initial:
      throw ProtocolError("ask: the initial design is awaiting responses; tell them first");
    case Phase::finished:
      throw BudgetExhausted("ask: the evaluation budget is exhausted");
    case Phase::awaiting_batch:
      return *pending_proposal_;
    case Phase::ready:
      break;
  }

  refresh_model();

  const int batch = std::min(config_.batch_size, remaining_budget());
  BatchOptions options;
  options.acquisition.starts = config_.acq_starts;
  options.acquisition.evals_per_start = config_.acq_evals_per_start;
  options.qei_draws = config_.mc_draws;

  const BatchProposal proposal = propose_batch_cl(
      *model_, *incumbent(), domain_, batch, config_.liar,
      derive_seed(config_.seed, kAcqTagBase + static_cast<std::uint64_t>(ask_count_)), options);

  pending_proposal_ = proposal;
  pending_points_ = proposal.points;
  pending_ei_ = proposal.ei;
  pending_is_initial_ = false;
  ask_count_ += 1;
  phase_ = Phase::awaiting_batch;
  return proposal;
}

void OptimizationState::tell(const Matrix& points, const Vector& values) {
  if (phase_ == Phase::ready) {
    throw ProtocolError("tell: no request is pending; call ask first");
  }
  if (phase_ == Phase::finished) {
    throw ProtocolError("tell: the campaign is already finished");
  }
  if (points.rows() != pending_points_.rows()) {
    throw MismatchedTell("tell: got " + std::to_string(points.rows()) + " rows, expected " +
                         std::to_string(pending_points_.rows()));
  }
  if (points.cols() != domain_.dimension()) {
    throw DimensionMismatch("tell: points have dimension " + std::to_string(points.cols()) +
                            ", campaign dimension is " + std::to_string(domain_.dimension()));
  }
  if (values.size() != points.rows()) {
    throw MismatchedTell("tell: got " + std::to_string(values.size()) + " values for " +
                         std::to_string(points.rows()) + " points");
  }
  const Vector width = domain_.width();
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      const double tol = 1e-9 * width[j];
      if (!(std::abs(points(i, j) - pending_points_(i, j)) <= tol)) {
        throw MismatchedTell("tell: row " + std::to_string(i) + " does not match the pending "
                             "request in coordinate " + std::to_string(j));
      }
    }
    if (!std::isfinite(values[i])) {
      throw NonFiniteValue("tell: response " + std::to_string(i) + " is not finite");
    }
  }

  const Eigen::Index old_n = evaluated_points_.rows();
  evaluated_points_.conservativeResize(old_n + points.rows(), domain_.dimension());
  evaluated_points_.bottomRows(points.rows()) = pending_points_;
  evaluated_values_.conservativeResize(old_n + values.size());
  evaluated_values_.tail(values.size()) = values;
  evaluation_ei_.conservativeResize(old_n + pending_ei_.size());
  evaluation_ei_.tail(pending_ei_.size()) = pending_ei_;

  pending_points_.resize(0, domain_.dimension());
  pending_ei_.resize(0);
  pending_proposal_.reset();
  pending_is_initial_ = false;
  phase_ = evaluated_count() >= config_.budget_total ? Phase::finished : Phase::ready;
}

CampaignResult OptimizationState::result() const {
  if (evaluated_count() == 0) {
    throw ProtocolError("result: no responses have been told yet");
  }
  Eigen::Index best = 0;
  evaluated_values_.maxCoeff(&best);
  CampaignResult out;
  out.best_point = evaluated_points_.row(best).transpose();
  out.best_value = evaluated_values_[best];
  out.points = evaluated_points_;
  out.values = evaluated_values_;
  out.proposal_ei = evaluation_ei_;
  return out;
}

nlohmann::json OptimizationState::to_json() const {
  nlohmann::json j;
  j["format"] = "krigopt-state-v1";
  j["domain"] = {{"lower", json_from_vector(domain_.lower)},
                 {"upper", json_from_vector(domain_.upper)}};
  j["config"] = {{"budget_total", config_.budget_total},
                 {"initial_size", config_.initial_size},
                 {"batch_size", config_.batch_size},
                 {"liar", to_string(config_.liar)},
                 {"family", to_string(config_.family)},
                 {"seed", config_.seed},
                 {"refit_every", config_.refit_every},
                 {"mle_starts", config_.mle_starts},
                 {"mle_evals_per_start", config_.mle_evals_per_start},
                 {"acq_starts", config_.acq_starts},
                 {"acq_evals_per_start", config_.acq_evals_per_start},
                 {"mc_draws", config_.mc_draws}};
  j["phase"] = to_string(phase_);
  j["ask_count"] = ask_count_;
  j["evaluated"] = {{"points", json_from_matrix(evaluated_points_)},
                    {"values", json_from_vector(evaluated_values_)},
                    {"ei", json_from_vector(evaluation_ei_)}};
  if (phase_ == Phase::awaiting_initial || phase_ == Phase::awaiting_batch) {
    nlohmann::json pending;
    pending["points"] = json_from_matrix(pending_points_);
    pending["ei"] = json_from_vector(pending_ei_);
    pending["is_initial"] = pending_is_initial_;
    if (pending_proposal_.has_value()) {
      pending["strategy"] = to_string(pending_proposal_->strategy);
      if (pending_proposal_->qei.has_value()) {
        pending["qei"] = {{"estimate", pending_proposal_->qei->estimate},
                          {"std_error", pending_proposal_->qei->std_error}};
      } else {
        pending["qei"] = nullptr;
      }
    } else {
      pending["strategy"] = nullptr;
      pending["qei"] = nullptr;
    }
    j["pending"] = pending;
  } else {
    j["pending"] = nullptr;
  }
  if (last_spec_.has_value()) {
    j["last_spec"] = {{"family", to_string(last_spec_->family)},
                      {"lengthscales", json_from_vector(last_spec_->lengthscales)},
                      {"process_variance", last_spec_->process_variance}};
  } else {
    j["last_spec"] = nullptr;
  }
  return j;
}

OptimizationState OptimizationState::from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || j.at("format").get<std::string>() != "krigopt-state-v1") {
      throw InvalidConfig("state: unrecognized format");
    }

    OptimizationState state;
    state.domain_.lower = vector_from_json(j.at("domain").at("lower"));
    state.domain_.upper = vector_from_json(j.at("domain").at("upper"));
    state.domain_.validate();
    const int d = state.domain_.dimension();

    const nlohmann::json& c = j.at("config");
    EgoConfig config;
    config.budget_total = c.at("budget_total").get<int>();
    config.initial_size = c.at("initial_size").get<int>();
    config.batch_size = c.at("batch_size").get<int>();
    config.liar = liar_from_string(c.at("liar").get<std::string>());
    config.family = kernel_family_from_string(c.at("family").get<std::string>());
    config.seed = c.at("seed").get<std::uint64_t>();
    config.refit_every = c.at("refit_every").get<int>();
    config.mle_starts = c.at("mle_starts").get<int>();
    config.mle_evals_per_start = c.at("mle_evals_per_start").get<int>();
    config.acq_starts = c.at("acq_starts").get<int>();
    config.acq_evals_per_start = c.at("acq_evals_per_start").get<int>();
    config.mc_draws = c.at("mc_draws").get<int>();
    state.config_ = config.resolved(d);

    try {
      state.phase_ = phase_from_string(j.at("phase").get<std::string>());
    } catch (const InvalidParameter& e) {
      throw InvalidConfig(std::string("state: ") + e.what());
    }
    state.ask_count_ = j.at("ask_count").get<int>();
    if (state.ask_count_ < 0) {
      throw InvalidConfig("state: ask_count must be non-negative");
    }

    const nlohmann::json& evaluated = j.at("evaluated");
    state.evaluated_points_ = matrix_from_json(evaluated.at("points"), d);
    state.evaluated_values_ = vector_from_json(evaluated.at("values"));
    state.evaluation_ei_ = vector_from_json(evaluated.at("ei"));
    if (state.evaluated_values_.size() != state.evaluated_points_.rows() ||
        state.evaluation_ei_.size() != state.evaluated_points_.rows()) {
      throw InvalidConfig("state: evaluated point/value/ei counts disagree");
    }
    if (!state.evaluated_points_.allFinite() || !state.evaluated_values_.allFinite()) {
      throw InvalidConfig("state: evaluated history contains non-finite entries");
    }
    if (state.evaluated_count() > state.config_.budget_total) {
      throw InvalidConfig("state: more evaluations than budget");
    }

    const nlohmann::json& pending = j.at("pending");
    const bool awaiting =
        state.phase_ == Phase::awaiting_initial || state.phase_ == Phase::awaiting_batch;
    if (awaiting != !pending.is_null()) {
      throw InvalidConfig("state: pending block inconsistent with phase");
    }
    if (awaiting) {
      state.pending_points_ = matrix_from_json(pending.at("points"), d);
      state.pending_ei_ = vector_from_json(pending.at("ei"));
      state.pending_is_initial_ = pending.at("is_initial").get<bool>();
      if (state.pending_ei_.size() != state.pending_points_.rows() ||
          state.pending_points_.rows() == 0) {
        throw InvalidConfig("state: pending block is malformed");
      }
      if (state.pending_is_initial_ != (state.phase_ == Phase::awaiting_initial)) {
        throw InvalidConfig("state: pending kind inconsistent with phase");
      }
      if (!pending.at("strategy").is_null()) {
        BatchProposal proposal;
        proposal.points = state.pending_points_;
        proposal.ei = state.pending_ei_;
        proposal.strategy = liar_from_string(pending.at("strategy").get<std::string>());
        if (!pending.at("qei").is_null()) {
          QeiEstimate q;
          q.estimate = pending.at("qei").at("estimate").get<double>();
          q.std_error = pending.at("qei").at("std_error").get<double>();
          proposal.qei = q;
        }
        state.pending_proposal_ = std::move(proposal);
      }
    } else {
      state.pending_points_.resize(0, d);
      state.pending_ei_.resize(0);
      state.pending_is_initial_ = false;
    }

    const nlohmann::json& spec_json = j.at("last_spec");
    if (!spec_json.is_null()) {
      KernelSpec spec;
      spec.family = kernel_family_from_string(spec_json.at("family").get<std::string>());
      spec.lengthscales = vector_from_json(spec_json.at("lengthscales"));
      spec.process_variance = spec_json.at("process_variance").get<double>();
      spec.validate();
      if (spec.dimension() != d) {
        throw InvalidConfig("state: stored kernel dimension mismatch");
      }
      state.last_spec_ = std::move(spec);
    }

    return state;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("state: malformed JSON structure: ") + e.what());
  }
}

CampaignResult run_closed_loop(const std::function<double(const Vector&)>& objective,
                               const BoxDomain& domain, const EgoConfig& config) {
  auto evaluate_rows = [&](const Matrix& points) {
    Vector values(points.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      const double v = objective(points.row(i).transpose());
      if (!std::isfinite(v)) {
        throw NonFiniteValue("objective returned a non-finite value");
      }
      values[i] = v;
    }
    return values;
  };

  auto [state, design] = OptimizationState::start(domain, config);
  state.tell(design.points, evaluate_rows(design.points));
  while (state.phase() != Phase::finished) {
    const BatchProposal proposal = state.ask();
    state.tell(proposal.points, evaluate_rows(proposal.points));
  }
  return state.result();
}

}  // namespace krigopt
