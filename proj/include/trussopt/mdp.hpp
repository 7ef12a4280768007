#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trussopt/fem.hpp"
#include "trussopt/model.hpp"
#include "trussopt/search_env.hpp"

namespace trussopt::mdp {

// Partial design: groups are assigned one by one in fixed catalog order.
// undetermined[i] mirrors the M_X,i convention (1 = area not chosen yet);
// unassigned entries of areas hold the round's starting value.
struct DesignState {
  std::vector<std::uint8_t> undetermined;
  std::vector<double> areas;  // m2
  int layer = 0;              // number of assigned groups

  bool terminal() const { return layer == static_cast<int>(areas.size()); }
};

DesignState initial_state(std::span<const double> x0_m2);

// Per-group candidate windows: ascending, contiguous in the catalog, width
// min(width, catalog size). The window is centered on the group's starting
// value; at the catalog boundary it shifts inward so the width is preserved
// (the center is then no longer the median).
using CandidateLists = std::vector<std::vector<double>>;
CandidateLists make_candidate_lists(const Catalog& catalog,
                                    std::span<const double> x0_m2, int width);

// Position of each group's starting value inside its window (every window
// contains its center value, clamped or not).
std::vector<int> window_positions(const CandidateLists& lists,
                                  std::span<const double> x0_m2);

struct Action {
  int group = -1;     // 0-based; -1 encodes the terminal no-op
  int choice = -1;    // index into the group's candidate list
  double area = 0.0;  // m2

  bool noop() const { return group < 0; }
};

// One action per candidate of the next unassigned group; terminal states
// get the single no-op.
std::vector<Action> action_space(const DesignState& s,
                                 const CandidateLists& lists);
DesignState apply_action(const DesignState& s, const Action& a);

// Terminal reward: 0 for an infeasible (or unstable) design, otherwise
// (alpha / W)^2. alpha is the configured normalizer weight in kg.
double terminal_reward(const TrussProblem& p, const DesignState& s,
                       double alpha_kg);

struct NodeFeature {
  double x, y, z;
  double fx, fy, fz;  // applied force, N
  double rx, ry, rz;  // reaction force, N
};

struct MemberFeature {
  int end1, end2;
  double length;
  double elastic_modulus;
  int undetermined;  // 1 while the group's area is not chosen
  double area;       // m2
};

struct FeatureVectors {
  std::vector<NodeFeature> nodes;
  std::vector<MemberFeature> members;
};

// Descriptive state features for logging/inspection; the search itself
// operates on the compact DesignState.
FeatureVectors feature_vectors(const TrussProblem& p, const DesignState& s,
                               const fem::AnalysisResult& r,
                               std::size_t load_case = 0);

std::string to_trace_line(const DesignState& s);

// Production SimEnv: maps candidate-index paths to area vectors and scores
// terminals with the truss analysis. Owns its Analyzer; one per worker.
class Environment final : public SimEnv {
 public:
  Environment(const TrussProblem& p, double alpha_kg);

  // preferred: per-group descent fallback (see SimEnv::preferred_choice);
  // empty means index 0.
  void set_lists(CandidateLists lists, std::vector<int> preferred = {});

  int depth() const override;
  int action_count(int layer) const override;
  TerminalEval evaluate(std::span<const int> choices) override;
  int preferred_choice(int layer) const override;

  std::vector<double> areas_from_choices(std::span<const int> choices) const;
  fem::QuickResult evaluate_areas(std::span<const double> areas_m2);

  const CandidateLists& lists() const { return lists_; }
  const TrussProblem& problem() const { return *problem_; }
  double alpha() const { return alpha_; }
  std::uint64_t evaluations() const { return analyzer_.evaluations(); }
  std::uint64_t unstable_terminals() const { return unstable_; }

 private:
  const TrussProblem* problem_;
  CandidateLists lists_;
  std::vector<int> preferred_;
  double alpha_;
  fem::Analyzer analyzer_;
  std::vector<double> scratch_;
  std::uint64_t unstable_ = 0;
};

}  // namespace trussopt::mdp
