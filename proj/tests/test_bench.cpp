#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "test_util.hpp"
#include "trussopt/bench.hpp"
#include "trussopt/fem.hpp"

using namespace trussopt;
using trussopt::test::data_path;
using trussopt::test::make_two_bar;

namespace {

std::vector<double> golden_areas(const char* file, double* expected) {
  const std::string path = data_path(file);
  std::ifstream in(path);
  REQUIRE(in);
  nlohmann::json j;
  in >> j;
  *expected = j["expected_weight"].get<double>();
  std::vector<double> areas;
  for (const auto& v : j["areas"])
    areas.push_back(v.get<double>() * units::mm2_to_m2);
  return areas;
}

}  // namespace

TEST_CASE("published designs verify feasible at the published weights") {
  struct Case {
    const char* problem;
    const char* golden;
  };
  const Case cases[] = {
      {"benchmarks/ten_bar_case1.json", "golden/ten_bar_case1_best.json"},
      {"benchmarks/ten_bar_case2.json", "golden/ten_bar_case2_best.json"},
      {"benchmarks/seventy_two_bar_case1.json",
       "golden/seventy_two_bar_case1_best.json"},
      {"benchmarks/seventy_two_bar_case2.json",
       "golden/seventy_two_bar_case2_best.json"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.problem);
    const TrussProblem p = load_problem(data_path(c.problem));
    double expected = 0.0;
    const auto areas = golden_areas(c.golden, &expected);
    const bench::GoldenReport r = bench::verify_golden(p, areas, expected);
    CHECK(r.feasible);
    CHECK(std::abs(r.delta_pct) <= 0.5);
    CHECK(r.max_stress_ratio <= 1.0 + 1e-9);
    CHECK(r.max_disp_ratio <= 1.0 + 1e-9);
  }
}

TEST_CASE("batch statistics are exact over the per-seed results") {
  const TrussProblem p = make_two_bar();
  driver::DriverConfig cfg;
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4};
  const bench::BatchReport r = bench::run_batch(p, cfg, seeds, 2);
  REQUIRE(r.runs.size() == 4);
  REQUIRE(r.feasible_runs == 4);

  double best = 1e300, worst = -1e300, sum = 0.0;
  for (const auto& run : r.runs) {
    CHECK_FALSE(run.failed);
    const double w = run.result.best_weight;
    best = std::min(best, w);
    worst = std::max(worst, w);
    sum += w;
  }
  CHECK(r.best == best);
  CHECK(r.worst == worst);
  CHECK(r.mean == doctest::Approx(sum / 4.0));
  CHECK(r.best <= r.mean);
  CHECK(r.mean <= r.worst);
  CHECK(r.stddev >= 0.0);
  REQUIRE(r.best_run() != nullptr);
  CHECK(r.best_run()->result.best_weight == r.best);
}

TEST_CASE("single-seed batch degenerates") {
  const TrussProblem p = make_two_bar();
  driver::DriverConfig cfg;
  const std::vector<std::uint64_t> seeds{7};
  const bench::BatchReport r = bench::run_batch(p, cfg, seeds);
  CHECK(r.best == r.worst);
  CHECK(r.best == r.mean);
  CHECK(r.stddev == 0.0);
}

TEST_CASE("batch reports are byte-for-byte reproducible") {
  const TrussProblem p = make_two_bar();
  driver::DriverConfig cfg;
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  auto render = [&] {
    const bench::BatchReport r = bench::run_batch(p, cfg, seeds, 2);
    std::ostringstream out;
    bench::write_batch_csv(r, out);
    return out.str();
  };
  CHECK(render() == render());
}

TEST_CASE("pareto sweep: staircase front, gaps recorded, degenerate case") {
  const TrussProblem p = make_two_bar();
  driver::DriverConfig cfg;
  cfg.seed = 6;

  const std::vector<double> limits{1.5e-3, 1.8e-3, 2.0e-3, 3.0e-3, 4.0e-3};
  const bench::ParetoResult r = bench::pareto_sweep(p, limits, cfg, 2);

  // no design reaches 1.5 mm
  REQUIRE(r.infeasible_limits.size() == 1);
  CHECK(r.infeasible_limits[0] == doctest::Approx(1.5e-3));

  REQUIRE(r.front.size() == 3);
  // sorted by weight ascending, non-dominated, monotone trade-off
  for (std::size_t i = 1; i < r.front.size(); ++i) {
    CHECK(r.front[i].weight > r.front[i - 1].weight);
    CHECK(r.front[i].max_disp < r.front[i - 1].max_disp);
  }
  CHECK(r.front[0].weight == doctest::Approx(39.25));
  CHECK(r.front[0].max_disp == doctest::Approx(2.6046e-3).epsilon(1e-3));
  CHECK(r.front[1].weight == doctest::Approx(49.0625));
  CHECK(r.front[2].weight == doctest::Approx(58.875));

  // degenerate sweep at the native limit reproduces the single-objective run
  const std::vector<double> native{4.0e-3};
  const bench::ParetoResult single = bench::pareto_sweep(p, native, cfg);
  const driver::OptimizationResult direct = driver::optimize(p, cfg);
  REQUIRE(single.front.size() == 1);
  CHECK(single.front[0].weight == direct.best_weight);

  std::ostringstream csv;
  bench::write_pareto_csv(r, csv);
  CHECK(csv.str().find("disp_limit_mm") == 0);

  CHECK_THROWS_AS(
      bench::pareto_sweep(p, std::vector<double>{2e-3, 1e-3}, cfg),
      ValidationError);
}

TEST_CASE("ablation sweep produces one cell per configuration") {
  const TrussProblem p = make_two_bar();
  const std::vector<std::uint64_t> seeds{1, 2};
  const bench::AblationReport r =
      bench::ablation_matrix(p, seeds, 2, false, 39.25);
  // 4 techniques + single-root at natural termination, plus the three
  // fixed-budget cells for the backprop and alpha comparisons
  CHECK(r.cells.size() == 8);
  for (const auto& cell : r.cells) {
    CHECK(cell.report.runs.size() == 2);
    CHECK(cell.report.feasible_runs == 2);
    CHECK(cell.median_evaluations > 0.0);
  }
  // on a 9-design instance every mode finds the optimum
  CHECK(r.best_reward_hits == 2);
  CHECK(r.multi_beats_single);

  std::ostringstream csv;
  bench::write_ablation_csv(r, csv);
  CHECK(csv.str().find("config,") == 0);
}
