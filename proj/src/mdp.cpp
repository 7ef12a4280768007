#include "trussopt/mdp.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace trussopt::mdp {

DesignState initial_state(std::span<const double> x0) {
  DesignState s;
  s.undetermined.assign(x0.size(), 1);
  s.areas.assign(x0.begin(), x0.end());
  s.layer = 0;
  return s;
}

CandidateLists make_candidate_lists(const Catalog& catalog,
                                    std::span<const double> x0, int width) {
  const int b = static_cast<int>(catalog.size());
  const int w = std::min(width, b);
  if (w < 1) throw ValidationError("candidate window width must be >= 1");
  CandidateLists lists(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    const int center = static_cast<int>(catalog.index_of(x0[i]));
    int start = center - (w - 1) / 2;
    start = std::clamp(start, 0, b - w);
    lists[i].resize(static_cast<std::size_t>(w));
    for (int h = 0; h < w; ++h)
      lists[i][static_cast<std::size_t>(h)] =
          catalog[static_cast<std::size_t>(start + h)];
  }
  return lists;
}

std::vector<int> window_positions(const CandidateLists& lists,
                                  std::span<const double> x0) {
  std::vector<int> positions(lists.size(), 0);
  for (std::size_t i = 0; i < lists.size(); ++i) {
    const double target = x0[i];
    const double tol = 1e-9 * std::max(std::abs(target), 1e-12);
    int found = -1;
    for (std::size_t h = 0; h < lists[i].size(); ++h)
      if (std::abs(lists[i][h] - target) <= tol) {
        found = static_cast<int>(h);
        break;
      }
    if (found < 0)
      throw ValidationError("starting value of group " + std::to_string(i + 1) +
                            " is not inside its candidate window");
    positions[i] = found;
  }
  return positions;
}

std::vector<Action> action_space(const DesignState& s,
                                 const CandidateLists& lists) {
  if (s.terminal()) return {Action{}};  // the no-op
  const auto& cands = lists[static_cast<std::size_t>(s.layer)];
  std::vector<Action> actions;
  actions.reserve(cands.size());
  for (std::size_t h = 0; h < cands.size(); ++h)
    actions.push_back(
        Action{s.layer, static_cast<int>(h), cands[h], });
  return actions;
}

DesignState apply_action(const DesignState& s, const Action& a) {
  if (a.noop()) {
    if (!s.terminal())
      throw ValidationError("terminal no-op applied to a non-terminal state");
    return s;
  }
  if (a.group != s.layer)
    throw ValidationError("action assigns group " + std::to_string(a.group + 1) +
                          " but the next unassigned group is " +
                          std::to_string(s.layer + 1));
  DesignState next = s;
  next.undetermined[static_cast<std::size_t>(a.group)] = 0;
  next.areas[static_cast<std::size_t>(a.group)] = a.area;
  next.layer = s.layer + 1;
  return next;
}

double terminal_reward(const TrussProblem& p, const DesignState& s,
                       double alpha_kg) {
  if (!s.terminal())
    throw ValidationError("reward requested for a non-terminal state");
  fem::Analyzer an(p);
  const fem::QuickResult q = an.evaluate(s.areas);
  if (!q.stable || !q.feasible) return 0.0;
  const double r = alpha_kg / q.weight;
  return r * r;
}

FeatureVectors feature_vectors(const TrussProblem& p, const DesignState& s,
                               const fem::AnalysisResult& r,
                               std::size_t load_case) {
  FeatureVectors fv;
  fv.nodes.reserve(p.nodes.size());
  const auto& reac = r.reactions[load_case];
  for (std::size_t k = 0; k < p.nodes.size(); ++k) {
    NodeFeature nf{};
    nf.x = p.nodes[k].coords[0];
    nf.y = p.nodes[k].coords[1];
    nf.z = p.nodes[k].coords[2];
    for (const auto& [nid, f] : p.load_cases[load_case].forces)
      if (static_cast<std::size_t>(nid) == k + 1) {
        nf.fx = f[0];
        nf.fy = f[1];
        nf.fz = f[2];
      }
    nf.rx = reac[k][0];
    nf.ry = reac[k][1];
    nf.rz = reac[k][2];
    fv.nodes.push_back(nf);
  }
  fv.members.reserve(p.members.size());
  for (const auto& m : p.members) {
    MemberFeature mf{};
    mf.end1 = m.ends[0];
    mf.end2 = m.ends[1];
    mf.length = m.length;
    mf.elastic_modulus = p.material.elastic_modulus;
    mf.undetermined = s.undetermined[static_cast<std::size_t>(m.group)];
    mf.area = s.areas[static_cast<std::size_t>(m.group)];
    fv.members.push_back(mf);
  }
  return fv;
}

std::string to_trace_line(const DesignState& s) {
  std::ostringstream out;
  out << "l=" << s.layer << " flags=";
  for (auto f : s.undetermined) out << static_cast<int>(f);
  out << " areas_mm2=";
  for (std::size_t i = 0; i < s.areas.size(); ++i) {
    if (i) out << ';';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", s.areas[i] * units::m2_to_mm2);
    out << buf;
  }
  return out.str();
}

Environment::Environment(const TrussProblem& p, double alpha_kg)
    : problem_(&p), alpha_(alpha_kg), analyzer_(p) {
  scratch_.resize(p.group_count());
}

void Environment::set_lists(CandidateLists lists, std::vector<int> preferred) {
  if (lists.size() != problem_->group_count())
    throw ValidationError("candidate lists do not cover every group");
  if (!preferred.empty() && preferred.size() != lists.size())
    throw ValidationError("preferred choices do not cover every group");
  lists_ = std::move(lists);
  preferred_ = std::move(preferred);
}

int Environment::depth() const {
  return static_cast<int>(problem_->group_count());
}

int Environment::action_count(int layer) const {
  return static_cast<int>(lists_[static_cast<std::size_t>(layer)].size());
}

int Environment::preferred_choice(int layer) const {
  if (preferred_.empty()) return 0;
  return preferred_[static_cast<std::size_t>(layer)];
}

TerminalEval Environment::evaluate(std::span<const int> choices) {
  for (std::size_t i = 0; i < scratch_.size(); ++i)
    scratch_[i] = lists_[i][static_cast<std::size_t>(choices[i])];
  const fem::QuickResult q = analyzer_.evaluate(scratch_);
  TerminalEval ev;
  ev.weight = q.weight;
  ev.feasible = q.stable && q.feasible;
  if (!q.stable) ++unstable_;
  if (ev.feasible) {
    const double r = alpha_ / q.weight;
    ev.reward = r * r;
  }
  return ev;
}

std::vector<double> Environment::areas_from_choices(
    std::span<const int> choices) const {
  std::vector<double> areas(scratch_.size());
  for (std::size_t i = 0; i < areas.size(); ++i)
    areas[i] = lists_[i][static_cast<std::size_t>(choices[i])];
  return areas;
}

fem::QuickResult Environment::evaluate_areas(std::span<const double> areas) {
  return analyzer_.evaluate(areas);
}

}  // namespace trussopt::mdp
