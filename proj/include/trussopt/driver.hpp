#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "trussopt/mcts.hpp"
#include "trussopt/mdp.hpp"
#include "trussopt/model.hpp"

namespace trussopt::driver {

// Window-width schedule across rounds.
enum class Technique { none, geometric, linear, step };

// Reward normalizer: the all-minimum-area weight (default) or the
// all-maximum-area weight (ablation).
enum class AlphaMode { min_weight, max_weight };

struct ScheduleParams {
  double gamma_geo = 0.5;
  int eps_geo = 3;
  int gamma_lin = 2;
  int gamma_red = 2;
  int eps_red = 3;
};

struct DriverConfig {
  Technique technique = Technique::geometric;
  mcts::Backprop backprop = mcts::Backprop::best;
  bool multi_root = true;  // false: one round at full width, no re-centering
  AlphaMode alpha_mode = AlphaMode::min_weight;
  double exploration = 1.4142135623730951;  // sqrt(2)
  ScheduleParams schedule;
  double eta_min_pct = 0.01;  // improvement threshold, percent
  int theta_max = 3;          // low-improvement rounds before termination
  int round_cap = 100;        // guard against pathological non-termination
  double budget_scale = 1.0;  // scales every layer budget (smoke runs)
  std::uint64_t seed = 1;
};

// Nominal window width for round p (1-based). Always odd, >= 3, and
// nonincreasing in the round number.
int width_schedule(Technique t, int catalog_size, int round,
                   const ScheduleParams& params = {});

// |(w - incumbent) / incumbent| * 100
double improvement_factor(double round_weight, double incumbent_best);

struct RoundPlan {
  int round = 1;
  int beta = 0;               // nominal width
  std::vector<double> x0;     // starting areas, m2
  mdp::CandidateLists lists;  // effective windows (width capped at b)
};

RoundPlan make_round_plan(const TrussProblem& p, const DriverConfig& cfg,
                          int round, std::span<const double> x0);

struct RoundOutcome {
  std::vector<double> areas;  // m2
  double weight = 0.0;        // kg
  bool feasible = false;
};

RoundOutcome run_round(mdp::Environment& env, const RoundPlan& plan,
                       const DriverConfig& cfg, IndexSource& rng,
                       mcts::TraceSink* trace = nullptr);

struct RoundRecord {
  int round = 0;  // 0 is the seed entry (all-maximum design)
  int beta = 0;
  double weight = 0.0;
  bool feasible = false;
  double eta_pct = 0.0;
  int theta_after = 0;
  double best_so_far = 0.0;  // min over feasible history entries; NaN if none
  std::uint64_t fem_evaluations = 0;  // cumulative
  double elapsed_s = 0.0;
};

struct OptimizationResult {
  std::vector<double> best_areas;  // m2; empty if nothing feasible was seen
  double best_weight = 0.0;
  bool feasible_found = false;
  std::vector<RoundRecord> history;  // seed entry first
  int rounds = 0;
  std::uint64_t fem_evaluations = 0;
  std::uint64_t unstable_terminals = 0;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
};

// The multi-round search: start every group at the catalog maximum, run a
// round, re-center the next round's windows on its result, and stop after
// theta_max rounds with improvement below eta_min (or at the round cap).
// With multi_root = false a single full-width round is run instead.
OptimizationResult optimize(const TrussProblem& p, const DriverConfig& cfg,
                            std::ostream* trace = nullptr);

struct BruteForceResult {
  std::vector<double> areas;  // m2
  double weight = 0.0;
  bool feasible_found = false;
  std::uint64_t enumerated = 0;
};

// Exhaustive enumeration over all catalog assignments; ties resolve to the
// lexicographically smallest area vector. Guarded: throws ValidationError
// when b^g exceeds the guard.
BruteForceResult brute_force(const TrussProblem& p,
                             std::uint64_t guard = 1'000'000);

// round, beta, weight, best-so-far, eta, theta, cumulative FEM evaluations,
// elapsed seconds; one row per round including the seed entry.
void write_convergence_csv(const OptimizationResult& r, std::ostream& out);

}  // namespace trussopt::driver
