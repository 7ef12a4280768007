#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "test_util.hpp"
#include "trussopt/driver.hpp"
#include "trussopt/fem.hpp"

using namespace trussopt;
using driver::Technique;
using trussopt::test::data_path;
using trussopt::test::make_two_bar;

TEST_CASE("width schedule: constant") {
  CHECK(driver::width_schedule(Technique::none, 42, 1) == 43);
  CHECK(driver::width_schedule(Technique::none, 42, 25) == 43);
  CHECK(driver::width_schedule(Technique::none, 5, 3) == 5);
}

TEST_CASE("width schedule: geometric decay") {
  const int expect64[] = {65, 33, 33, 33, 17, 17, 17, 9, 9, 9, 5, 5, 5, 3, 3, 3};
  for (int p = 1; p <= 16; ++p)
    CHECK(driver::width_schedule(Technique::geometric, 64, p) ==
          expect64[p - 1]);
  CHECK(driver::width_schedule(Technique::geometric, 64, 50) == 3);

  const int expect42[] = {43, 21, 21, 21, 11, 11, 11, 5, 5, 5, 3, 3, 3};
  for (int p = 1; p <= 13; ++p)
    CHECK(driver::width_schedule(Technique::geometric, 42, p) ==
          expect42[p - 1]);
}

TEST_CASE("width schedule: linear decrease") {
  // even catalog: half + 1 = 33
  for (int p = 1; p <= 15; ++p)
    CHECK(driver::width_schedule(Technique::linear, 64, p) == 33 - 2 * (p - 1));
  CHECK(driver::width_schedule(Technique::linear, 64, 16) == 3);
  CHECK(driver::width_schedule(Technique::linear, 64, 40) == 3);
  // b = 42 starts even (22) and is bumped to 23
  CHECK(driver::width_schedule(Technique::linear, 42, 1) == 23);
  CHECK(driver::width_schedule(Technique::linear, 42, 2) == 21);
  CHECK(driver::width_schedule(Technique::linear, 42, 11) == 3);
  CHECK(driver::width_schedule(Technique::linear, 42, 12) == 3);
  // odd catalog: floor(b/2) can be even and is bumped upward
  CHECK(driver::width_schedule(Technique::linear, 25, 1) == 13);
}

TEST_CASE("width schedule: step reduction") {
  const int expect64[] = {33, 33, 33, 31, 31, 31, 29, 29, 29};
  for (int p = 1; p <= 9; ++p)
    CHECK(driver::width_schedule(Technique::step, 64, p) == expect64[p - 1]);
  CHECK(driver::width_schedule(Technique::step, 64, 60) == 3);
  CHECK(driver::width_schedule(Technique::step, 42, 1) == 23);
  CHECK(driver::width_schedule(Technique::step, 42, 4) == 21);
}

TEST_CASE("width schedules are odd, nonincreasing, floored at 3") {
  for (Technique t : {Technique::none, Technique::geometric, Technique::linear,
                      Technique::step}) {
    for (int b : {2, 3, 5, 10, 25, 32, 42, 64, 77}) {
      int prev = 1 << 20;
      for (int p = 1; p <= 60; ++p) {
        const int beta = driver::width_schedule(t, b, p);
        CHECK(beta % 2 == 1);
        CHECK(beta >= 3);
        CHECK(beta <= prev);
        prev = beta;
      }
    }
  }
}

TEST_CASE("improvement factor") {
  CHECK(driver::improvement_factor(100.0, 100.0) == doctest::Approx(0.0));
  CHECK(driver::improvement_factor(99.0, 100.0) == doctest::Approx(1.0));
  CHECK(driver::improvement_factor(2490.56, 2490.56) == doctest::Approx(0.0));
  // the factor is an absolute value: a worse round also registers
  CHECK(driver::improvement_factor(110.0, 100.0) == doctest::Approx(10.0));
}

TEST_CASE("brute force on the two-bar instance") {
  const TrussProblem p = make_two_bar();
  const driver::BruteForceResult r = driver::brute_force(p);
  CHECK(r.enumerated == 9);
  REQUIRE(r.feasible_found);
  CHECK(r.weight == doctest::Approx(39.25));
  CHECK(r.areas == std::vector<double>{500e-6, 1500e-6});
}

TEST_CASE("brute force on a single-group problem returns the smallest "
          "feasible area") {
  TrussProblem p = make_two_bar();
  p.groups = {{1, 2}};
  validate(p);
  const driver::BruteForceResult r = driver::brute_force(p);
  REQUIRE(r.feasible_found);
  // both members share one area; member 2 needs 1500 mm2
  CHECK(r.areas == std::vector<double>{1500e-6});
}

TEST_CASE("brute force guard") {
  const TrussProblem p =
      load_problem(data_path("benchmarks/ten_bar_case1.json"));
  CHECK_THROWS_WITH_AS(driver::brute_force(p, 1000),
                       doctest::Contains("too large"), ValidationError);
}

TEST_CASE("round plan builds top-clamped round-1 windows") {
  const TrussProblem p = make_two_bar();
  driver::DriverConfig cfg;
  const std::vector<double> x0(2, p.catalog.max_area());
  const driver::RoundPlan plan = driver::make_round_plan(p, cfg, 1, x0);
  CHECK(plan.beta == 3);
  CHECK(plan.lists[0] == std::vector<double>{500e-6, 1000e-6, 1500e-6});
}

TEST_CASE("run_round accounts one analysis per iteration plus the final") {
  const TrussProblem p = make_two_bar();
  driver::DriverConfig cfg;
  mdp::Environment env(p, fem::alpha_weight(p));
  Rng rng(1);
  const std::vector<double> x0(2, p.catalog.max_area());
  const driver::RoundPlan plan = driver::make_round_plan(p, cfg, 1, x0);
  long expected = 1;  // the final-state evaluation
  for (int l = 0; l < 2; ++l)
    expected += mcts::iteration_budget(l, 3, plan.beta, 2);
  const auto before = env.evaluations();
  driver::run_round(env, plan, cfg, rng);
  CHECK(env.evaluations() - before == static_cast<std::uint64_t>(expected));
}

TEST_CASE("a round started at the optimum stays there") {
  const TrussProblem p = make_two_bar();
  driver::DriverConfig cfg;
  mdp::Environment env(p, fem::alpha_weight(p));
  Rng rng(4);
  const std::vector<double> x0{500e-6, 1500e-6};
  const driver::RoundPlan plan = driver::make_round_plan(p, cfg, 12, x0);
  CHECK(plan.beta == 3);
  const driver::RoundOutcome out = driver::run_round(env, plan, cfg, rng);
  CHECK(out.weight == doctest::Approx(39.25));
  CHECK(driver::improvement_factor(out.weight, 39.25) ==
        doctest::Approx(0.0));
}

TEST_CASE("optimize matches the exhaustive oracle on the two-bar instance") {
  const TrussProblem p = make_two_bar();
  const driver::BruteForceResult oracle = driver::brute_force(p);
  int matches = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    driver::DriverConfig cfg;
    cfg.seed = seed;
    const driver::OptimizationResult r = driver::optimize(p, cfg);
    REQUIRE(r.feasible_found);
    // the search can never beat the exhaustive optimum
    CHECK(r.best_weight >= oracle.weight - 1e-9);
    if (std::abs(r.best_weight - oracle.weight) <= 1e-9 * oracle.weight)
      ++matches;
  }
  CHECK(matches >= 18);
}

TEST_CASE("optimize history: best-so-far is nonincreasing, rounds recorded") {
  const TrussProblem p = make_two_bar();
  driver::DriverConfig cfg;
  cfg.seed = 2;
  const driver::OptimizationResult r = driver::optimize(p, cfg);
  REQUIRE(!r.history.empty());
  CHECK(r.history.front().round == 0);
  CHECK(r.history.front().weight == doctest::Approx(58.875));  // all-maximum
  double prev = std::numeric_limits<double>::infinity();
  std::uint64_t prev_evals = 0;
  for (const auto& rec : r.history) {
    if (!std::isnan(rec.best_so_far)) {
      CHECK(rec.best_so_far <= prev + 1e-12);
      prev = rec.best_so_far;
    }
    CHECK(rec.fem_evaluations >= prev_evals);
    prev_evals = rec.fem_evaluations;
  }
  CHECK(r.rounds == static_cast<int>(r.history.size()) - 1);
  CHECK(r.fem_evaluations == r.history.back().fem_evaluations);

  std::ostringstream csv;
  driver::write_convergence_csv(r, csv);
  CHECK(csv.str().find("round,beta") == 0);
}

TEST_CASE("termination: theta counts rounds without improvement") {
  const TrussProblem p = make_two_bar();
  driver::DriverConfig cfg;
  cfg.seed = 3;
  const driver::OptimizationResult r = driver::optimize(p, cfg);
  // the run ends once theta reaches theta_max (or at the cap)
  CHECK(r.history.back().theta_after >= cfg.theta_max);
  CHECK(r.rounds <= cfg.round_cap);
  // eta of a no-change round is zero, strictly below the threshold
  bool saw_stall = false;
  for (const auto& rec : r.history)
    if (rec.round > 0 && rec.eta_pct < cfg.eta_min_pct) saw_stall = true;
  CHECK(saw_stall);
}

TEST_CASE("single-root mode runs exactly one full-width round") {
  const TrussProblem p = make_two_bar();
  driver::DriverConfig cfg;
  cfg.multi_root = false;
  cfg.seed = 5;
  const driver::OptimizationResult r = driver::optimize(p, cfg);
  CHECK(r.rounds == 1);
  CHECK(r.history.size() == 2);
  CHECK(r.history[1].beta == 3);  // odd_up(b) with b = 3
  CHECK(r.feasible_found);
}

TEST_CASE("identical seed and config reproduce the identical result") {
  const TrussProblem p = make_two_bar();
  driver::DriverConfig cfg;
  cfg.seed = 11;
  std::ostringstream t1, t2;
  const driver::OptimizationResult a = driver::optimize(p, cfg, &t1);
  const driver::OptimizationResult b = driver::optimize(p, cfg, &t2);
  CHECK(a.best_weight == b.best_weight);
  CHECK(a.best_areas == b.best_areas);
  CHECK(a.rounds == b.rounds);
  CHECK(a.fem_evaluations == b.fem_evaluations);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].weight == b.history[i].weight);
    CHECK(a.history[i].eta_pct == b.history[i].eta_pct);
    CHECK(a.history[i].theta_after == b.history[i].theta_after);
  }
  CHECK(t1.str() == t2.str());
  CHECK(!t1.str().empty());
}

TEST_CASE("ten-bar round 1 lands strictly below the all-maximum weight") {
  const TrussProblem p =
      load_problem(data_path("benchmarks/ten_bar_case1.json"));
  const double wbar0 = fem::max_weight(p);
  driver::DriverConfig cfg;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    mdp::Environment env(p, fem::alpha_weight(p));
    Rng rng(seed);
    const std::vector<double> x0(10, p.catalog.max_area());
    const driver::RoundPlan plan = driver::make_round_plan(p, cfg, 1, x0);
    const driver::RoundOutcome out = driver::run_round(env, plan, cfg, rng);
    CHECK(out.weight < wbar0);
    CHECK(out.feasible);
  }
}
