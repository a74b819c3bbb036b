#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <krigopt/design.hpp>
#include <krigopt/ego.hpp>
#include <krigopt/errors.hpp>

#include <cmath>

using namespace krigopt;

namespace {

BoxDomain interval(double lo, double hi) {
  BoxDomain d;
  d.lower = Vector::Constant(1, lo);
  d.upper = Vector::Constant(1, hi);
  return d;
}

EgoConfig small_config(std::uint64_t seed = 7u) {
  EgoConfig c;
  c.budget_total = 10;
  c.initial_size = 6;
  c.batch_size = 1;
  c.seed = seed;
  c.mle_starts = 3;
  c.mle_evals_per_start = 60;
  c.acq_starts = 6;
  c.acq_evals_per_start = 60;
  c.mc_draws = 500;
  return c;
}

Vector evaluate_rows(const Matrix& pts, const std::function<double(const Vector&)>& f) {
  Vector out(pts.rows());
  for (int i = 0; i < pts.rows(); ++i) out[i] = f(pts.row(i).transpose());
  return out;
}

double hump(const Vector& x) { return -((x[0] - 0.6) * (x[0] - 0.6)); }

}  // namespace

TEST_CASE("start issues a reproducible initial design and enforces the protocol") {
  BoxDomain d = interval(0.0, 1.0);
  EgoConfig c = small_config();
  auto [state, design] = OptimizationState::start(d, c);
  CHECK(state.phase() == Phase::awaiting_initial);
  CHECK(design.size() == 6);
  CHECK(design.dimension() == 1);
  CHECK(state.pending_points().rows() == 6);
  CHECK(state.evaluated_count() == 0);
  CHECK_FALSE(state.incumbent().has_value());

  // the design derives from the campaign seed through the public tag
  DesignMatrix expect = lhs(6, d, derive_seed(c.seed, kDesignSeedTag));
  CHECK((design.points - expect.points).cwiseAbs().maxCoeff() == 0.0);

  auto [state2, design2] = OptimizationState::start(d, c);
  CHECK((design.points - design2.points).cwiseAbs().maxCoeff() == 0.0);

  // asking before the initial tell is a protocol violation
  CHECK_THROWS_AS(state.ask(), ProtocolError);
  // result before any response is a protocol violation
  CHECK_THROWS_AS(state.result(), ProtocolError);
}

TEST_CASE("config validation raises InvalidConfig") {
  BoxDomain d = interval(0.0, 1.0);
  EgoConfig c = small_config();

  EgoConfig no_budget = c;
  no_budget.budget_total = 0;
  CHECK_THROWS_AS(OptimizationState::start(d, no_budget), InvalidConfig);

  EgoConfig tiny_initial = c;
  tiny_initial.initial_size = 1;
  CHECK_THROWS_AS(OptimizationState::start(d, tiny_initial), InvalidConfig);

  EgoConfig eats_budget = c;
  eats_budget.initial_size = c.budget_total;
  CHECK_THROWS_AS(OptimizationState::start(d, eats_budget), InvalidConfig);

  EgoConfig bad_batch = c;
  bad_batch.batch_size = 0;
  CHECK_THROWS_AS(OptimizationState::start(d, bad_batch), InvalidConfig);

  EgoConfig bad_refit = c;
  bad_refit.refit_every = 0;
  CHECK_THROWS_AS(OptimizationState::start(d, bad_refit), InvalidConfig);

  EgoConfig bad_draws = c;
  bad_draws.mc_draws = 1;
  CHECK_THROWS_AS(OptimizationState::start(d, bad_draws), InvalidConfig);

  // zero initial_size resolves to half the budget
  EgoConfig defaulted = c;
  defaulted.initial_size = 0;
  auto [state, design] = OptimizationState::start(d, defaulted);
  CHECK(design.size() == c.budget_total / 2);
}

TEST_CASE("tell validates counts, coordinates, and values") {
  BoxDomain d = interval(0.0, 1.0);
  auto [state, design] = OptimizationState::start(d, small_config());

  Vector y = evaluate_rows(design.points, hump);

  Matrix short_pts = design.points.topRows(3);
  Vector short_y = y.head(3);
  CHECK_THROWS_AS(state.tell(short_pts, short_y), MismatchedTell);

  Matrix moved = design.points;
  moved(0, 0) += 0.01;  // far beyond the 1e-9-width tolerance
  CHECK_THROWS_AS(state.tell(moved, y), MismatchedTell);

  Vector bad_y = y;
  bad_y[2] = std::nan("");
  CHECK_THROWS_AS(state.tell(design.points, bad_y), NonFiniteValue);

  Matrix wrong_dim(design.points.rows(), 2);
  wrong_dim.setZero();
  CHECK_THROWS_AS(state.tell(wrong_dim, y), DimensionMismatch);

  // a tiny within-tolerance perturbation is accepted and the stored
  // coordinates are the requested (canonical) ones
  Matrix nudged = design.points;
  nudged(0, 0) += 1e-12;
  state.tell(nudged, y);
  CHECK(state.phase() == Phase::ready);
  CHECK(state.evaluated_count() == 6);
  CHECK(state.evaluated_points()(0, 0) == design.points(0, 0));
  CHECK(state.incumbent().has_value());
  CHECK(state.incumbent()->value == doctest::Approx(y.maxCoeff()));

  // nothing is pending now, so another tell is a protocol violation
  CHECK_THROWS_AS(state.tell(design.points, y), ProtocolError);
}

TEST_CASE("ask is idempotent until the matching tell arrives") {
  BoxDomain d = interval(0.0, 1.0);
  auto [state, design] = OptimizationState::start(d, small_config());
  state.tell(design.points, evaluate_rows(design.points, hump));

  BatchProposal first = state.ask();
  CHECK(state.phase() == Phase::awaiting_batch);
  CHECK(state.ask_count() == 1);
  BatchProposal second = state.ask();
  CHECK(state.ask_count() == 1);
  CHECK((first.points - second.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK((state.pending_points() - first.points).cwiseAbs().maxCoeff() == 0.0);

  state.tell(first.points, evaluate_rows(first.points, hump));
  CHECK(state.evaluated_count() == 7);
}

TEST_CASE("the batch is clamped to the remaining budget and the campaign finishes") {
  BoxDomain d = interval(0.0, 1.0);
  EgoConfig c = small_config(3u);
  c.budget_total = 7;
  c.initial_size = 4;
  c.batch_size = 2;
  auto [state, design] = OptimizationState::start(d, c);
  state.tell(design.points, evaluate_rows(design.points, hump));

  BatchProposal b1 = state.ask();
  CHECK(b1.points.rows() == 2);
  state.tell(b1.points, evaluate_rows(b1.points, hump));
  CHECK(state.remaining_budget() == 1);

  BatchProposal b2 = state.ask();
  CHECK(b2.points.rows() == 1);  // clamped: only one evaluation left
  state.tell(b2.points, evaluate_rows(b2.points, hump));

  CHECK(state.phase() == Phase::finished);
  CHECK(state.remaining_budget() == 0);
  CHECK_THROWS_AS(state.ask(), BudgetExhausted);
  Vector extra_y(1);
  extra_y << 0.0;
  CHECK_THROWS_AS(state.tell(b2.points.topRows(1), extra_y), ProtocolError);

  CampaignResult res = state.result();
  CHECK(res.points.rows() == 7);
  CHECK(res.values.size() == 7);
  CHECK(res.proposal_ei.size() == 7);
  for (int i = 0; i < 4; ++i) CHECK(std::isnan(res.proposal_ei[i]));
  for (int i = 4; i < 7; ++i) CHECK(res.proposal_ei[i] >= 0.0);
  CHECK(res.best_value == doctest::Approx(res.values.maxCoeff()));
  int arg = 0;
  res.values.maxCoeff(&arg);
  CHECK((res.best_point - res.points.row(arg).transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("run_closed_loop maximizes a smooth one-dimensional objective") {
  BoxDomain d = interval(0.0, 1.0);
  EgoConfig c = small_config(11u);
  c.budget_total = 14;
  c.initial_size = 6;
  CampaignResult res = run_closed_loop(hump, d, c);
  CHECK(res.points.rows() == 14);
  CHECK(res.best_value == doctest::Approx(res.values.maxCoeff()));
  CHECK(res.best_value > -0.01);  // true maximum is 0 at x = 0.6
  CHECK(std::abs(res.best_point[0] - 0.6) < 0.15);

  // the loop beats the best of the initial design alone
  const double initial_best = res.values.head(6).maxCoeff();
  CHECK(res.best_value >= initial_best);
}

TEST_CASE("run_closed_loop is deterministic in the seed") {
  BoxDomain d = interval(-2.0, 3.0);
  EgoConfig c = small_config(77u);
  c.budget_total = 9;
  c.initial_size = 5;
  auto f = [](const Vector& x) { return std::sin(2.0 * x[0]) - 0.1 * x[0] * x[0]; };
  CampaignResult a = run_closed_loop(f, d, c);
  CampaignResult b = run_closed_loop(f, d, c);
  CHECK((a.points - b.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);

  EgoConfig c2 = c;
  c2.seed = 78u;
  CampaignResult other = run_closed_loop(f, d, c2);
  CHECK((a.points - other.points).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("run_closed_loop survives a constant objective via the MLE fallback") {
  BoxDomain d = interval(0.0, 1.0);
  EgoConfig c = small_config(5u);
  c.budget_total = 8;
  c.initial_size = 5;
  CampaignResult res = run_closed_loop([](const Vector&) { return 5.0; }, d, c);
  CHECK(res.points.rows() == 8);
  CHECK(res.best_value == 5.0);
}

TEST_CASE("run_closed_loop rejects non-finite objective values") {
  BoxDomain d = interval(0.0, 1.0);
  EgoConfig c = small_config(5u);
  auto f = [](const Vector& x) { return x[0] > 0.5 ? std::nan("") : 0.0; };
  CHECK_THROWS_AS(run_closed_loop(f, d, c), NonFiniteValue);
}

TEST_CASE("serialization round-trips mid-campaign and replays identically") {
  BoxDomain d = interval(0.0, 1.0);
  EgoConfig c = small_config(41u);
  c.budget_total = 9;
  c.initial_size = 5;
  c.batch_size = 2;

  // twin A runs straight through; twin B is serialized and restored mid-flight
  auto [a, design_a] = OptimizationState::start(d, c);
  auto [b, design_b] = OptimizationState::start(d, c);
  Vector y0 = evaluate_rows(design_a.points, hump);
  a.tell(design_a.points, y0);
  b.tell(design_b.points, y0);

  BatchProposal ask_a = a.ask();

  nlohmann::json snapshot = b.to_json();
  OptimizationState restored = OptimizationState::from_json(snapshot);
  CHECK(restored.phase() == b.phase());
  CHECK(restored.evaluated_count() == b.evaluated_count());
  BatchProposal ask_b = restored.ask();
  CHECK((ask_a.points - ask_b.points).cwiseAbs().maxCoeff() == 0.0);

  // also round-trip in the awaiting_batch phase: the pending proposal survives
  nlohmann::json pending_snapshot = restored.to_json();
  OptimizationState restored2 = OptimizationState::from_json(pending_snapshot);
  CHECK(restored2.phase() == Phase::awaiting_batch);
  BatchProposal cached = restored2.ask();
  CHECK((cached.points - ask_b.points).cwiseAbs().maxCoeff() == 0.0);

  Vector y1 = evaluate_rows(ask_a.points, hump);
  a.tell(ask_a.points, y1);
  restored2.tell(ask_b.points, y1);
  BatchProposal next_a = a.ask();
  BatchProposal next_b = restored2.ask();
  CHECK((next_a.points - next_b.points).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("from_json rejects corrupt state") {
  CHECK_THROWS_AS(OptimizationState::from_json(nlohmann::json::object()), InvalidConfig);
  nlohmann::json wrong_format = {{"format", "something-else"}};
  CHECK_THROWS_AS(OptimizationState::from_json(wrong_format), InvalidConfig);

  BoxDomain d = interval(0.0, 1.0);
  auto [state, design] = OptimizationState::start(d, small_config());
  nlohmann::json good = state.to_json();
  nlohmann::json tampered = good;
  tampered["evaluated"]["values"].push_back(1.0);  // now inconsistent with points
  CHECK_THROWS_AS(OptimizationState::from_json(tampered), InvalidConfig);
}

TEST_CASE("phase names round-trip") {
  for (Phase p : {Phase::awaiting_initial, Phase::ready, Phase::awaiting_batch, Phase::finished}) {
    CHECK(phase_from_string(to_string(p)) == p);
  }
  CHECK_THROWS_AS(phase_from_string("paused"), InvalidParameter);
}
