#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "trussopt/model.hpp"

namespace trussopt::fem {

// One area per group, m2, each drawn from the problem catalog.
using AreaAssignment = std::vector<double>;

struct AnalysisResult {
  // [case][3 * node] displacements in m; exactly 0 at suppressed DOFs.
  std::vector<std::vector<double>> displacements;
  // [case][member] axial stress in Pa, tension positive.
  std::vector<std::vector<double>> stresses;
  // [case][node] reaction force in N; zero at unsupported nodes.
  std::vector<std::vector<std::array<double, 3>>> reactions;
  double weight = 0.0;      // kg
  bool feasible = false;
  double violation = 0.0;   // max constraint ratio - 1 (negative = margin)
};

struct QuickResult {
  double weight = 0.0;
  bool feasible = false;
  double violation = 0.0;
  bool stable = true;
};

// Direct-stiffness analysis with a per-problem precomputed plan. One
// Analyzer per thread: evaluate() reuses internal workspaces and performs
// no allocation. Analyses are pure functions of (problem, areas).
class Analyzer {
 public:
  explicit Analyzer(const TrussProblem& p);

  // Hot path used by the search: weight + feasibility + worst ratio.
  // Counts one evaluation. A mechanism yields stable=false, feasible=false.
  QuickResult evaluate(std::span<const double> areas_m2);

  // Full analysis (displacements, stresses, reactions). Validates the
  // assignment against the catalog; throws AnalysisError on a mechanism,
  // naming the near-null direction. Counts one evaluation.
  AnalysisResult analyze(std::span<const double> areas_m2);

  // Assembly only, exposed for tests; does not count as an evaluation.
  void assemble(std::span<const double> areas_m2);
  std::span<const double> stiffness() const;   // row-major nf x nf
  std::size_t free_dof_count() const { return nf_; }

  std::uint64_t evaluations() const { return evaluations_; }
  void reset_evaluations() { evaluations_ = 0; }
  const TrussProblem& problem() const { return *problem_; }

 private:
  bool factor_and_solve();  // returns false on mechanism; fills u_ per case
  double case_violation(std::size_t case_idx);

  const TrussProblem* problem_;
  std::size_t nf_ = 0;                  // free DOF count
  std::vector<std::int32_t> dof_;       // [3c] free index, or nf_ (zero sink)
  std::vector<double> coef_;            // E/L per member
  std::vector<double> dir_[3];
  std::vector<std::int32_t> end1_[3];
  std::vector<std::int32_t> end2_[3];
  std::vector<double> f_free_;          // [case * nf] load vector
  // workspaces
  std::vector<double> k_;               // nf x nf
  std::vector<double> u_;               // [case * (nf + 1)], trailing zero slot
  std::vector<double> stress_;          // per member
  std::ptrdiff_t bad_pivot_ = -1;
  std::uint64_t evaluations_ = 0;
};

double total_weight(const TrussProblem& p, std::span<const double> areas_m2);
double alpha_weight(const TrussProblem& p);  // all areas at catalog minimum
double max_weight(const TrussProblem& p);    // all areas at catalog maximum

// Convenience one-shot full analysis.
AnalysisResult solve(const TrussProblem& p, std::span<const double> areas_m2);

// Each X_i must be a catalog value; length must equal the group count.
void validate_assignment(const TrussProblem& p,
                         std::span<const double> areas_m2);

// One row per member and per node, all load cases; used by --dump-analysis.
void write_analysis_csv(const TrussProblem& p, std::span<const double> areas,
                        const AnalysisResult& r, std::ostream& out);

}  // namespace trussopt::fem
