#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "mobsim/bayesopt.hpp"
#include "mobsim/sobol.hpp"

using namespace mobsim;

TEST_CASE("exploration weight schedule") {
  // n = 1, d = 1, delta = 0.1: sqrt(2 ln(pi^2 / 0.3))
  CHECK(kappa(1, 1) == doctest::Approx(2.6432).epsilon(1e-3));
  double prev = 0.0;
  for (int n = 1; n <= 50; ++n) {
    double k = kappa(n, 3);
    CHECK(k >= prev);
    prev = k;
  }
  CHECK(std::min(kappa(40, 2), 1.0) == 1.0);  // the late-stage cap value
  CHECK_THROWS_AS(kappa(0, 1), std::invalid_argument);
}

TEST_CASE("proposals respect the box and frozen coordinates") {
  GaussianProcess gp(3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 6; ++i) gp.add({u(rng), u(rng), u(rng)}, u(rng));

  Box box = Box::unit(3);
  box.lo = {0.2, 0.0, 0.1};
  box.hi = {0.8, 0.4, 1.0};
  std::map<int, double> frozen = {{1, 0.33}};
  auto x = next_point(gp, 2.0, box, frozen);
  REQUIRE(x.size() == 3);
  CHECK(x[1] == 0.33);  // exact
  CHECK(x[0] >= 0.2);
  CHECK(x[0] <= 0.8);
  CHECK(x[2] >= 0.1);
  CHECK(x[2] <= 1.0);
  // Deterministic.
  CHECK(next_point(gp, 2.0, box, frozen) == x);
}

TEST_CASE("empty model proposes a quasi-random box point") {
  GaussianProcess gp(2);
  auto x = next_point(gp, 1.0, Box::unit(2), {});
  for (double v : x) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("a single poor observation pushes the proposal away") {
  GaussianProcess gp(2);
  gp.set_lengthscales({0.3, 0.3});
  gp.add({0.5, 0.5}, -1.0);
  auto x = next_point(gp, kappa(1, 2), Box::unit(2), {});
  auto [mu_x, sigma_x] = gp.posterior(x);
  auto [mu_d, sigma_d] = gp.posterior({0.5, 0.5});
  // The proposal's acquisition dominates the data point's.
  double k = kappa(1, 2);
  CHECK(mu_x + k * sigma_x >= mu_d + k * sigma_d);
  double dist = std::hypot(x[0] - 0.5, x[1] - 0.5);
  CHECK(dist > 0.2);
}

TEST_CASE("operator-level search finds a quadratic maximum") {
  // Regulator dim 1 (frozen), operator dims 2; profit peaks at (0.7, 0.3).
  OptimizationState state(1, 2);
  EvalFn eval = [](const std::vector<double>& u) {
    double dy1 = u[1] - 0.7, dy2 = u[2] - 0.3;
    return Evaluation{-(dy1 * dy1 + dy2 * dy2), 0.0};
  };
  BoSettings settings;
  settings.budget_operator = 30;
  // The quadratic is flat near its peak; run the full budget instead of
  // stopping on stalled improvement.
  settings.improvement_tol = 1e-7;
  settings.patience = 30;
  OperatorResult res =
      optimize_operator(state, {0.5}, Box::unit(3), eval, settings);
  REQUIRE(res.u.size() == 3);
  CHECK(res.u[0] == 0.5);
  CHECK(std::abs(res.u[1] - 0.7) < 0.05);
  CHECK(std::abs(res.u[2] - 0.3) < 0.05);
  CHECK(res.evaluations <= 30);
  CHECK(state.evaluations() == res.evaluations);
}

TEST_CASE("truncated box keeps proposals under the cap") {
  OptimizationState state(1, 1);
  EvalFn eval = [](const std::vector<double>& u) {
    return Evaluation{u[1], 0.0};  // wants y as large as possible
  };
  Box box = Box::unit(2);
  box.hi[1] = 0.6;  // the cap
  BoSettings settings;
  settings.budget_operator = 12;
  OperatorResult res = optimize_operator(state, {0.2}, box, eval, settings);
  for (const auto& u : state.profit_x) CHECK(u[1] <= 0.6 + 1e-12);
  CHECK(res.u[1] == doctest::Approx(0.6).epsilon(1e-3));
}

TEST_CASE("incumbent profit is nondecreasing over the recorded history") {
  OptimizationState state(1, 2);
  std::mt19937_64 rng(9);
  EvalFn eval = [&](const std::vector<double>& u) {
    double v = -std::pow(u[1] - 0.4, 2) - std::pow(u[2] - 0.6, 2);
    return Evaluation{v, 0.0};
  };
  BoSettings settings;
  settings.budget_operator = 20;
  optimize_operator(state, {0.0}, Box::unit(3), eval, settings);
  double best = -1e30;
  for (const auto& e : state.profit_f) {
    double prev = best;
    best = std::max(best, e.profit);
    CHECK(best >= prev);
  }
}

TEST_CASE("two-level loop solves an analytic nested problem") {
  // Inner optimum y*(x) = 0.25 + 0.5 x; welfare peaks at x = 0.6 when
  // the operator plays its best response.
  OptimizationState state(1, 1);
  EvalFn eval = [](const std::vector<double>& u) {
    double x = u[0], y = u[1];
    double ystar = 0.25 + 0.5 * x;
    double profit = 1.0 - 25.0 * (y - ystar) * (y - ystar);
    double welfare = 1.0 - 4.0 * (x - 0.6) * (x - 0.6) - 2.0 * (y - ystar) * (y - ystar);
    return Evaluation{profit, welfare};
  };
  BoSettings settings;
  settings.init_operator = 5;
  settings.init_regulator = 6;
  settings.budget_operator = 15;
  settings.budget_regulator = 6;
  auto box = [](const std::vector<double>&) { return Box::unit(2); };
  RegulatorResult res = optimize_regulator(state, {0.0}, box, eval, settings);
  CHECK(std::abs(res.u[0] - 0.6) < 0.07);
  CHECK(res.inner_evaluations <= 200);
  // One welfare observation per regulator setting.
  CHECK(state.welfare_gp().size() == static_cast<int>(res.welfare_trace.size()));
  CHECK(state.welfare_gp().size() == 1 + 6 + 6);
}

TEST_CASE("warm hyperplanes skip initialization and converge in fewer runs") {
  EvalFn eval = [](const std::vector<double>& u) {
    double ystar = 0.25 + 0.5 * u[0];
    return Evaluation{1.0 - 25.0 * std::pow(u[1] - ystar, 2), 0.0};
  };
  BoSettings settings;
  settings.init_operator = 8;
  settings.budget_operator = 40;

  OptimizationState cold(1, 1);
  OperatorResult cold_res =
      optimize_operator(cold, {0.5}, Box::unit(2), eval, settings);

  OptimizationState warm(1, 1);
  optimize_operator(warm, {0.4}, Box::unit(2), eval, settings);
  OperatorResult warm_res =
      optimize_operator(warm, {0.5}, Box::unit(2), eval, settings);

  CHECK(warm_res.evaluations < cold_res.evaluations);
  CHECK(std::abs(warm_res.u[1] - 0.5) < 0.05);
}

TEST_CASE("checkpoint round trip restores the surrogates") {
  OptimizationState state(2, 2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 7; ++i)
    state.record({u(rng), u(rng), u(rng), u(rng)}, {u(rng), u(rng)});
  state.record_regulator({0.3, 0.6}, 1.25);
  state.operator_iterations = 7;

  auto path = std::filesystem::temp_directory_path() / "mobsim_ckpt.json";
  state.save(path);
  OptimizationState back = OptimizationState::load(path);
  std::filesystem::remove(path);

  CHECK(back.operator_iterations == 7);
  CHECK(back.profit_x == state.profit_x);
  CHECK(back.welfare_f == state.welfare_f);
  auto q = std::vector<double>{0.2, 0.4, 0.6, 0.8};
  CHECK(back.profit_gp().posterior(q).first ==
        doctest::Approx(state.profit_gp().posterior(q).first).epsilon(1e-12));
}
