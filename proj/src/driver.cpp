#include "trussopt/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "trussopt/fem.hpp"

namespace trussopt::driver {

namespace {

int odd_up(int v) { return (v % 2 == 0) ? v + 1 : v; }

// Full-width start: b, bumped to odd.
int beta_full(int b) { return odd_up(b); }

// Half-width start used by the linear and step schedules. The published
// rule (floor(b/2) for odd b, b/2 + 1 for even b) can produce an even
// width; symmetric windows need an odd one, so we bump upward. Tiny
// catalogs would start below the floor of 3 and break monotonicity, so the
// floor applies to round 1 as well.
int beta_half(int b) {
  const int raw = (b % 2 == 1) ? b / 2 : b / 2 + 1;
  return std::max(3, odd_up(raw));
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int width_schedule(Technique t, int b, int p, const ScheduleParams& s) {
  if (b < 2 || p < 1)
    throw ValidationError("width schedule needs catalog size >= 2, round >= 1");
  switch (t) {
    case Technique::none:
      return beta_full(b);
    case Technique::geometric: {
      const int b1 = beta_full(b);
      if (p == 1) return b1;
      const double exponent =
          std::ceil(static_cast<double>(p - 1) / s.eps_geo);
      const double phi = b1 * std::pow(s.gamma_geo, exponent);
      return std::max(3, odd_up(static_cast<int>(std::floor(phi))));
    }
    case Technique::linear: {
      const int b1 = beta_half(b);
      if (p == 1) return b1;
      return std::max(3, odd_up(b1 - s.gamma_lin * (p - 1)));
    }
    case Technique::step: {
      const int b1 = beta_half(b);
      if (p == 1) return b1;
      return std::max(3, odd_up(b1 - s.gamma_red * ((p - 1) / s.eps_red)));
    }
  }
  throw ValidationError("unknown technique");
}

double improvement_factor(double round_weight, double incumbent_best) {
  return std::abs((round_weight - incumbent_best) / incumbent_best * 100.0);
}

RoundPlan make_round_plan(const TrussProblem& p, const DriverConfig& cfg,
                          int round, std::span<const double> x0) {
  RoundPlan plan;
  plan.round = round;
  const Technique t = cfg.multi_root ? cfg.technique : Technique::none;
  plan.beta = width_schedule(t, static_cast<int>(p.catalog.size()), round,
                             cfg.schedule);
  plan.x0.assign(x0.begin(), x0.end());
  plan.lists = mdp::make_candidate_lists(p.catalog, x0, plan.beta);
  return plan;
}

RoundOutcome run_round(mdp::Environment& env, const RoundPlan& plan,
                       const DriverConfig& cfg, IndexSource& rng,
                       mcts::TraceSink* trace) {
  env.set_lists(plan.lists, mdp::window_positions(plan.lists, plan.x0));
  const int b = static_cast<int>(env.problem().catalog.size());
  const int g = env.depth();
  const auto budget = [&](int layer) {
    const long j = mcts::iteration_budget(layer, b, plan.beta, g);
    return std::max<long>(1, static_cast<long>(
                                 std::ceil(cfg.budget_scale * static_cast<double>(j))));
  };
  const std::vector<int> choices = mcts::policy_improvement(
      env, budget, cfg.backprop, cfg.exploration, rng, trace);

  RoundOutcome out;
  out.areas = env.areas_from_choices(choices);
  const fem::QuickResult q = env.evaluate_areas(out.areas);
  out.weight = q.weight;
  out.feasible = q.stable && q.feasible;
  return out;
}

OptimizationResult optimize(const TrussProblem& p, const DriverConfig& cfg,
                            std::ostream* trace) {
  const auto t0 = Clock::now();
  const std::size_t g = p.group_count();

  OptimizationResult result;
  result.seed = cfg.seed;

  const double wbar0 = fem::max_weight(p);
  const double alpha = cfg.alpha_mode == AlphaMode::min_weight
                           ? fem::alpha_weight(p)
                           : wbar0;
  mdp::Environment env(p, alpha);
  Rng rng(cfg.seed);

  if (trace) mcts::write_trace_header(*trace);

  std::vector<double> x0(g, p.catalog.max_area());
  const fem::QuickResult seed_eval = env.evaluate_areas(x0);

  double best = std::numeric_limits<double>::quiet_NaN();
  if (seed_eval.stable && seed_eval.feasible) {
    best = wbar0;
    result.best_areas = x0;
    result.best_weight = wbar0;
    result.feasible_found = true;
  }
  result.history.push_back(RoundRecord{0, 0, wbar0,
                                       seed_eval.stable && seed_eval.feasible,
                                       0.0, 0, best, env.evaluations(),
                                       seconds_since(t0)});

  int theta = 0;
  for (int p_round = 1; p_round <= cfg.round_cap; ++p_round) {
    const RoundPlan plan = make_round_plan(p, cfg, p_round, x0);
    mcts::TraceSink sink{trace, p_round, 0};
    const RoundOutcome round =
        run_round(env, plan, cfg, rng, trace ? &sink : nullptr);
    result.rounds = p_round;

    // eta is computed against the incumbent before this round's weight
    // joins the history; infeasible incumbents never enter the minimum.
    const double eta = std::isnan(best)
                           ? std::numeric_limits<double>::infinity()
                           : improvement_factor(round.weight, best);
    if (eta < cfg.eta_min_pct) ++theta;
    if (round.feasible && (std::isnan(best) || round.weight < best)) {
      best = round.weight;
      result.best_areas = round.areas;
      result.best_weight = best;
      result.feasible_found = true;
    }
    result.history.push_back(RoundRecord{p_round, plan.beta, round.weight,
                                         round.feasible, eta, theta, best,
                                         env.evaluations(),
                                         seconds_since(t0)});
    x0 = round.areas;
    if (!cfg.multi_root) break;
    if (theta >= cfg.theta_max) break;
  }

  result.fem_evaluations = env.evaluations();
  result.unstable_terminals = env.unstable_terminals();
  result.wall_seconds = seconds_since(t0);
  return result;
}

BruteForceResult brute_force(const TrussProblem& p, std::uint64_t guard) {
  const std::size_t g = p.group_count();
  const std::size_t b = p.catalog.size();
  const double log_states =
      static_cast<double>(g) * std::log(static_cast<double>(b));
  if (log_states > std::log(static_cast<double>(guard)) + 1e-12)
    throw ValidationError("instance too large for exhaustive enumeration: " +
                          std::to_string(b) + "^" + std::to_string(g) +
                          " states exceed the guard of " +
                          std::to_string(guard));

  fem::Analyzer analyzer(p);
  BruteForceResult best;
  best.weight = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> idx(g, 0);
  std::vector<double> areas(g, p.catalog.min_area());
  while (true) {
    ++best.enumerated;
    const double w = fem::total_weight(p, areas);
    // Enumeration is lexicographic ascending, so the first design at any
    // given weight wins ties; heavier-or-equal candidates can be skipped
    // without analysis.
    if (w < best.weight) {
      const fem::QuickResult q = analyzer.evaluate(areas);
      if (q.stable && q.feasible) {
        best.weight = w;
        best.areas = areas;
        best.feasible_found = true;
      }
    }
    // odometer, rightmost fastest
    std::size_t i = g;
    while (i-- > 0) {
      if (++idx[i] < b) {
        areas[i] = p.catalog[idx[i]];
        break;
      }
      idx[i] = 0;
      areas[i] = p.catalog[0];
      if (i == 0) return best;
    }
  }
}

void write_convergence_csv(const OptimizationResult& r, std::ostream& out) {
  out << "round,beta,weight_kg,feasible,eta_pct,theta,best_kg,fem_evaluations,"
         "elapsed_s\n";
  char buf[256];
  for (const RoundRecord& rec : r.history) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.6f,%d,%.6g,%d,%.6f,%llu,%.3f\n",
                  rec.round, rec.beta, rec.weight, rec.feasible ? 1 : 0,
                  rec.eta_pct, rec.theta_after, rec.best_so_far,
                  static_cast<unsigned long long>(rec.fem_evaluations),
                  rec.elapsed_s);
    out << buf;
  }
}

}  // namespace trussopt::driver
