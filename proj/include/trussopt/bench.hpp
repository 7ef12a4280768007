#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trussopt/driver.hpp"
#include "trussopt/model.hpp"

namespace trussopt::bench {

struct SeedOutcome {
  std::uint64_t seed = 0;
  driver::OptimizationResult result;
  bool failed = false;
  std::string error;
};

struct BatchReport {
  std::vector<SeedOutcome> runs;  // in seed order
  // statistics over runs that found a feasible design
  double best = 0.0;
  double worst = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t feasible_runs = 0;
  std::uint64_t total_fem_evaluations = 0;

  const SeedOutcome* best_run() const;
};

// One independent optimization per seed, fanned out across worker threads
// (0 = hardware concurrency). Per-seed failures are recorded, not fatal.
BatchReport run_batch(const TrussProblem& p, const driver::DriverConfig& cfg,
                      std::span<const std::uint64_t> seeds, int threads = 0);

struct GoldenReport {
  double weight = 0.0;         // kg, under this implementation
  double expected = 0.0;       // kg, published value
  double delta_pct = 0.0;      // signed, relative to expected
  bool feasible = false;
  double max_stress_ratio = 0.0;
  double max_disp_ratio = 0.0;
};

// Evaluate a published design against the problem: weight delta and
// constraint margins. An infeasible published design indicates a geometry
// or unit bug in the benchmark data.
GoldenReport verify_golden(const TrussProblem& p,
                           std::span<const double> areas_m2,
                           double expected_kg);

struct ParetoPoint {
  double weight = 0.0;      // kg
  double max_disp = 0.0;    // m, achieved maximum |displacement|
  std::vector<double> areas;  // m2
  double limit = 0.0;       // m, displacement bound used
};

struct ParetoResult {
  std::vector<ParetoPoint> front;       // non-dominated, weight ascending
  std::vector<double> infeasible_limits;  // bounds with no feasible design
};

// Epsilon-constraint sweep: re-solve the single-objective problem under
// each displacement bound (+/- limit), then keep the non-dominated
// (weight, max displacement) pairs.
ParetoResult pareto_sweep(const TrussProblem& p,
                          std::span<const double> limits_m,
                          const driver::DriverConfig& cfg, int threads = 0);

struct AblationCell {
  std::string label;
  driver::DriverConfig config;
  BatchReport report;
  double median_weight = 0.0;
  double median_evaluations = 0.0;
  std::size_t target_hits = 0;  // seeds whose best is within 0.5% of target
};

struct AblationReport {
  std::vector<AblationCell> cells;
  // orderings measured on the slice where every other factor is at its
  // default (multi-root, best reward, minimum-weight alpha)
  bool evals_ordered = false;        // geometric < linear < step < none
  bool multi_beats_single = false;   // best-of-seeds comparison
  std::size_t best_reward_hits = 0;
  std::size_t average_reward_hits = 0;
  double median_alpha_min = 0.0;
  double median_alpha_max = 0.0;
};

// Sweeps the four schedule techniques, both backpropagation rules, single-
// vs multi-root, and both alpha modes. full_cross runs the complete
// product; otherwise one factor varies at a time. target_kg (optional)
// enables hit counting at 0.5%.
AblationReport ablation_matrix(const TrussProblem& p,
                               std::span<const std::uint64_t> seeds,
                               int threads = 0, bool full_cross = false,
                               std::optional<double> target_kg = {});

void write_batch_csv(const BatchReport& r, std::ostream& out);
void write_pareto_csv(const ParetoResult& r, std::ostream& out);
void write_ablation_csv(const AblationReport& r, std::ostream& out);

double median(std::vector<double> values);

}  // namespace trussopt::bench
