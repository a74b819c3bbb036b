#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "krigopt/acquisition.hpp"
#include "krigopt/design.hpp"
#include "krigopt/kriging.hpp"

namespace krigopt {

// Campaign life cycle.  Evaluations are produced by the caller, so the state
// machine always alternates a request (the initial design or an ask batch)
// with a matching tell.
enum class Phase {
  awaiting_initial,  // design issued, responses not yet told
  ready,             // model can be refreshed and a batch requested
  awaiting_batch,    // ask issued, responses not yet told
  finished,          // evaluation budget exhausted
};

std::string to_string(Phase phase);
Phase phase_from_string(const std::string& name);

// Seed-derivation tag for the initial design stream; campaigns and
// standalone space-filling runs that share a seed draw the same design.
inline constexpr std::uint64_t kDesignSeedTag = 0x44u;

// Campaign configuration.  The loop MAXIMIZES the objective.
struct EgoConfig {
  int budget_total = 0;  // total evaluations, initial design included
  int initial_size = 0;  // 0 resolves to budget_total / 2
  int batch_size = 1;
  LiarKind liar = LiarKind::cl_mixed;
  KernelFamily family = KernelFamily::matern52;
  std::uint64_t seed = 0;

  int refit_every = 1;           // re-estimate hyperparameters every k asks
  int mle_starts = 10;
  int mle_evals_per_start = 0;   // 0 = 200 * d
  int acq_starts = 20;
  int acq_evals_per_start = 0;   // 0 = 200 * d
  int mc_draws = 10000;          // qEI draws for the cl_mixed comparison

  // Resolves defaults and throws InvalidConfig on any out-of-range field.
  EgoConfig resolved(int dimension) const;
};

// Evaluation history plus the incumbent.  proposal_ei holds the
// single-point expected improvement each input promised when it was
// proposed; initial-design rows carry NaN.
struct CampaignResult {
  Vector best_point;
  double best_value = 0.0;
  Matrix points;
  Vector values;
  Vector proposal_ei;
};

// Resumable ask/tell driver.  All randomness derives from config.seed, so a
// campaign replayed with the same seed and the same responses reproduces
// every request bit for bit, including across save/load round trips.
class OptimizationState {
 public:
  // Opens a campaign: validates the configuration, draws the initial Latin
  // hypercube design, and returns it as the first pending request.
  static std::pair<OptimizationState, DesignMatrix> start(const BoxDomain& domain,
                                                          const EgoConfig& config);

  Phase phase() const { return phase_; }
  const BoxDomain& domain() const { return domain_; }
  const EgoConfig& config() const { return config_; }

  int evaluated_count() const { return static_cast<int>(evaluated_values_.size()); }
  int remaining_budget() const { return config_.budget_total - evaluated_count(); }
  const Matrix& evaluated_points() const { return evaluated_points_; }
  const Vector& evaluated_values() const { return evaluated_values_; }
  const Vector& evaluation_ei() const { return evaluation_ei_; }
  int ask_count() const { return ask_count_; }

  // Rows currently awaiting responses (the initial design or the last ask
  // batch); empty in ready/finished phases.
  const Matrix& pending_points() const { return pending_points_; }

  // Model used for the most recent proposal, when one has been built in this
  // process (not rebuilt by from_json until the next ask).
  const std::optional<GpModel>& model() const { return model_; }

  // Largest response seen so far; empty before the first tell.
  std::optional<Incumbent> incumbent() const;

  // Requests the next batch.  In ready phase this refreshes the model
  // (re-estimating hyperparameters on the configured cadence) and runs the
  // constant-liar construction, clamping the batch to the remaining budget.
  // Asking again before the matching tell returns the identical pending
  // proposal.  Raises ProtocolError while the initial design is pending and
  // BudgetExhausted once finished.
  BatchProposal ask();

  // Hands back responses for the pending request.  Rows must match the
  // pending points in order and coordinates (tolerance 1e-9 of the domain
  // width per coordinate); values must be finite.  Raises MismatchedTell on
  // any mismatch and ProtocolError when nothing is pending.
  void tell(const Matrix& points, const Vector& values);

  // Best-so-far summary and full history; requires at least one response.
  CampaignResult result() const;

  // Lossless state serialization (JSON).  from_json validates structural
  // consistency and throws InvalidConfig on corrupt input.
  nlohmann::json to_json() const;
  static OptimizationState from_json(const nlohmann::json& j);

 private:
  OptimizationState() = default;

  void refresh_model();

  BoxDomain domain_;
  EgoConfig config_;
  Phase phase_ = Phase::awaiting_initial;

  Matrix evaluated_points_;
  Vector evaluated_values_;
  Vector evaluation_ei_;

  Matrix pending_points_;
  Vector pending_ei_;
  bool pending_is_initial_ = true;
  std::optional<BatchProposal> pending_proposal_;

  int ask_count_ = 0;
  std::optional<GpModel> model_;
  std::optional<KernelSpec> last_spec_;  // hyperparameters for cadence reuse and resume
};

// Runs a whole campaign against a callable objective (maximization).
// Non-finite objective values raise NonFiniteValue.
CampaignResult run_closed_loop(const std::function<double(const Vector&)>& objective,
                               const BoxDomain& domain, const EgoConfig& config);

}  // namespace krigopt
