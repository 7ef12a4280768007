// Command-line harness: single analyses, optimization runs, seeded batches,
// ablation sweeps, Pareto sweeps, published-design verification, and the
// exhaustive oracle for tiny instances.
//
// Exit codes: 0 success, 1 input error, 2 infeasible / no solution found.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trussopt/bench.hpp"
#include "trussopt/driver.hpp"
#include "trussopt/fem.hpp"
#include "trussopt/model.hpp"

namespace {

using namespace trussopt;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInfeasible = 2;

std::vector<double> load_design_mm2(const std::string& path,
                                    std::optional<double>* expected_kg) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open design file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!j.contains("areas") || !j["areas"].is_array())
    throw ParseError(path + ": missing \"areas\" array (mm2)");
  std::vector<double> areas;
  for (const auto& v : j["areas"])
    areas.push_back(v.get<double>() * units::mm2_to_m2);
  if (expected_kg && j.contains("expected_weight"))
    *expected_kg = j["expected_weight"].get<double>();
  return areas;
}

void save_design(const std::string& path, std::span<const double> areas_m2,
                 double weight_kg) {
  nlohmann::json j;
  j["areas"] = nlohmann::json::array();
  for (double a : areas_m2) j["areas"].push_back(a * units::m2_to_mm2);
  j["weight"] = weight_kg;
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write design file: " + path);
  out << j.dump(2) << '\n';
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    const std::uint64_t a = std::stoull(spec.substr(0, dots));
    const std::uint64_t b = std::stoull(spec.substr(dots + 2));
    if (b < a) throw ParseError("seed range end precedes start: " + spec);
    for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) seeds.push_back(std::stoull(item));
  if (seeds.empty()) throw ParseError("no seeds in: " + spec);
  return seeds;
}

void print_areas(std::span<const double> areas_m2) {
  std::printf("  areas (mm2):");
  for (double a : areas_m2) std::printf(" %.2f", a * units::m2_to_mm2);
  std::printf("\n");
}

driver::Technique technique_from(const std::string& s) {
  if (s == "none") return driver::Technique::none;
  if (s == "geometric") return driver::Technique::geometric;
  if (s == "linear") return driver::Technique::linear;
  if (s == "step") return driver::Technique::step;
  throw ParseError("unknown technique: " + s);
}

void print_run_summary(const driver::OptimizationResult& r) {
  if (r.feasible_found) {
    std::printf("best weight: %.2f kg\n", r.best_weight);
    print_areas(r.best_areas);
  } else {
    std::printf("no feasible design found\n");
  }
  std::printf("rounds: %d  fem evaluations: %llu  time: %.2f s\n", r.rounds,
              static_cast<unsigned long long>(r.fem_evaluations),
              r.wall_seconds);
}

void write_run_outputs(const std::string& out_dir,
                       const driver::OptimizationResult& r) {
  std::filesystem::create_directories(out_dir);
  std::ofstream conv(out_dir + "/convergence.csv");
  driver::write_convergence_csv(r, conv);
  if (r.feasible_found)
    save_design(out_dir + "/best_design.json", r.best_areas, r.best_weight);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete truss sizing via multi-root Monte Carlo tree search"};
  app.require_subcommand(1);

  std::string problem_path, areas_path, dump_path, out_dir, trace_path;
  std::string technique = "geometric", backprop = "best", alpha = "min";
  std::string seeds_spec = "1..10", limits_spec, golden_path;
  bool single_root = false, full_cross = false;
  std::uint64_t seed = 1;
  int threads = 0;
  double budget_scale = 1.0;

  auto add_problem_arg = [&](CLI::App* cmd) {
    cmd->add_option("problem", problem_path, "problem file (JSON)")
        ->required();
  };
  auto add_config_opts = [&](CLI::App* cmd) {
    cmd->add_option("--technique", technique,
                    "width schedule: geometric|linear|step|none");
    cmd->add_option("--backprop", backprop, "backpropagation: best|average");
    cmd->add_flag("--single-root", single_root,
                  "one full-width round, no re-centering");
    cmd->add_option("--alpha", alpha, "reward normalizer: min|max");
    cmd->add_option("--budget-scale", budget_scale,
                    "scale factor on the per-layer iteration budgets");
  };

  CLI::App* solve = app.add_subcommand("solve", "run one analysis");
  add_problem_arg(solve);
  solve->add_option("--areas", areas_path, "design file (JSON, mm2)");
  solve->add_option("--dump-analysis", dump_path, "per-member/node CSV");

  CLI::App* optimize = app.add_subcommand("optimize", "run one optimization");
  add_problem_arg(optimize);
  add_config_opts(optimize);
  optimize->add_option("--seed", seed, "random seed");
  optimize->add_option("--trace", trace_path, "per-iteration search log");
  optimize->add_option("--out", out_dir, "output directory");

  CLI::App* batch = app.add_subcommand("batch", "seeded statistical batch");
  add_problem_arg(batch);
  add_config_opts(batch);
  batch->add_option("--seeds", seeds_spec, "range a..b or list a,b,c");
  batch->add_option("--threads", threads, "worker threads (0 = auto)");
  batch->add_option("--out", out_dir, "output directory");

  CLI::App* ablate = app.add_subcommand("ablate", "configuration sweep");
  add_problem_arg(ablate);
  ablate->add_option("--seeds", seeds_spec, "range a..b or list a,b,c");
  ablate->add_option("--threads", threads, "worker threads (0 = auto)");
  ablate->add_flag("--full-cross", full_cross,
                   "full factor cross instead of one-at-a-time");
  ablate->add_option("--out", out_dir, "output directory");

  CLI::App* pareto = app.add_subcommand(
      "pareto", "weight vs displacement trade-off sweep");
  add_problem_arg(pareto);
  add_config_opts(pareto);
  pareto->add_option("--limits", limits_spec,
                     "comma-separated displacement bounds, mm, ascending")
      ->required();
  pareto->add_option("--seed", seed, "random seed");
  pareto->add_option("--threads", threads, "worker threads (0 = auto)");
  pareto->add_option("--out", out_dir, "output directory");

  CLI::App* verify =
      app.add_subcommand("verify", "evaluate a published design");
  add_problem_arg(verify);
  verify->add_option("--golden", golden_path, "design file with areas (mm2)")
      ->required();

  CLI::App* oracle =
      app.add_subcommand("oracle", "exhaustive search (tiny instances)");
  add_problem_arg(oracle);

  CLI11_PARSE(app, argc, argv);

  try {
    const TrussProblem problem = load_problem(problem_path);

    driver::DriverConfig cfg;
    cfg.technique = technique_from(technique);
    if (backprop == "best")
      cfg.backprop = mcts::Backprop::best;
    else if (backprop == "average")
      cfg.backprop = mcts::Backprop::average;
    else
      throw ParseError("unknown backprop mode: " + backprop);
    cfg.multi_root = !single_root;
    if (alpha == "min")
      cfg.alpha_mode = driver::AlphaMode::min_weight;
    else if (alpha == "max")
      cfg.alpha_mode = driver::AlphaMode::max_weight;
    else
      throw ParseError("unknown alpha mode: " + alpha);
    cfg.budget_scale = budget_scale;
    cfg.seed = seed;

    if (*solve) {
      std::vector<double> areas(problem.group_count(),
                                problem.catalog.max_area());
      if (!areas_path.empty()) areas = load_design_mm2(areas_path, nullptr);
      const fem::AnalysisResult r = fem::solve(problem, areas);
      std::printf("weight: %.2f kg  feasible: %s  violation: %+.3e\n",
                  r.weight, r.feasible ? "yes" : "no", r.violation);
      print_areas(areas);
      if (!dump_path.empty()) {
        std::ofstream out(dump_path);
        fem::write_analysis_csv(problem, areas, r, out);
      }
      return r.feasible ? kExitOk : kExitInfeasible;
    }

    if (*optimize) {
      std::ofstream trace;
      if (!trace_path.empty()) trace.open(trace_path);
      const driver::OptimizationResult r = driver::optimize(
          problem, cfg, trace_path.empty() ? nullptr : &trace);
      print_run_summary(r);
      if (!out_dir.empty()) write_run_outputs(out_dir, r);
      return r.feasible_found ? kExitOk : kExitInfeasible;
    }

    if (*batch) {
      const auto seeds = parse_seeds(seeds_spec);
      const bench::BatchReport report =
          bench::run_batch(problem, cfg, seeds, threads);
      std::printf(
          "seeds: %zu  feasible runs: %zu\nbest: %.2f  worst: %.2f  mean: "
          "%.2f  stddev: %.2f kg\n",
          seeds.size(), report.feasible_runs, report.best, report.worst,
          report.mean, report.stddev);
      if (const auto* run = report.best_run()) {
        print_areas(run->result.best_areas);
        std::printf("  (seed %llu)\n",
                    static_cast<unsigned long long>(run->seed));
      }
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream out(out_dir + "/batch.csv");
        bench::write_batch_csv(report, out);
        if (const auto* run = report.best_run())
          save_design(out_dir + "/best_design.json", run->result.best_areas,
                      run->result.best_weight);
      }
      return report.feasible_runs > 0 ? kExitOk : kExitInfeasible;
    }

    if (*ablate) {
      const auto seeds = parse_seeds(seeds_spec);
      const bench::AblationReport report =
          bench::ablation_matrix(problem, seeds, threads, full_cross);
      std::ostringstream table;
      bench::write_ablation_csv(report, table);
      std::fputs(table.str().c_str(), stdout);
      std::printf(
          "evaluation ordering geometric<linear<step<none: %s\n"
          "multi-root best <= single-root best: %s\n",
          report.evals_ordered ? "yes" : "no",
          report.multi_beats_single ? "yes" : "no");
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream out(out_dir + "/ablation.csv");
        bench::write_ablation_csv(report, out);
      }
      return kExitOk;
    }

    if (*pareto) {
      std::vector<double> limits;
      std::stringstream ss(limits_spec);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) limits.push_back(std::stod(item) * units::mm_to_m);
      const bench::ParetoResult result =
          bench::pareto_sweep(problem, limits, cfg, threads);
      std::ostringstream table;
      bench::write_pareto_csv(result, table);
      std::fputs(table.str().c_str(), stdout);
      for (double gap : result.infeasible_limits)
        std::printf("# no feasible design at limit %.3f mm\n",
                    gap * units::m_to_mm);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream out(out_dir + "/pareto.csv");
        bench::write_pareto_csv(result, out);
      }
      return result.front.empty() ? kExitInfeasible : kExitOk;
    }

    if (*verify) {
      std::optional<double> expected;
      const std::vector<double> areas = load_design_mm2(golden_path, &expected);
      if (!expected)
        throw ParseError(golden_path + ": missing \"expected_weight\" (kg)");
      const bench::GoldenReport r =
          bench::verify_golden(problem, areas, *expected);
      std::printf(
          "weight: %.2f kg  expected: %.2f kg  delta: %+.3f%%\n"
          "feasible: %s  max stress ratio: %.4f  max displacement ratio: "
          "%.4f\n",
          r.weight, r.expected, r.delta_pct, r.feasible ? "yes" : "no",
          r.max_stress_ratio, r.max_disp_ratio);
      const bool ok = r.feasible && std::abs(r.delta_pct) <= 0.5;
      return ok ? kExitOk : kExitInfeasible;
    }

    if (*oracle) {
      const driver::BruteForceResult r = driver::brute_force(problem);
      std::printf("enumerated %llu designs\n",
                  static_cast<unsigned long long>(r.enumerated));
      if (!r.feasible_found) {
        std::printf("no feasible design exists\n");
        return kExitInfeasible;
      }
      std::printf("optimal weight: %.4f kg\n", r.weight);
      print_areas(r.areas);
      return kExitOk;
    }
  } catch (const ParseError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInputError;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInputError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  }
  return kExitOk;
}
