#include "trussopt/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <ostream>
#include <sstream>

#include "trussopt/kernels.hpp"

namespace trussopt::fem {

namespace {
constexpr double kFeasibilitySlack = 1e-9;  // ratio <= 1 + slack counts as met
}

Analyzer::Analyzer(const TrussProblem& p) : problem_(&p) {
  const std::size_t c = p.nodes.size();
  dof_.assign(3 * c, 0);
  std::size_t nf = 0;
  for (std::size_t k = 0; k < c; ++k)
    for (int a = 0; a < 3; ++a)
      dof_[3 * k + a] = p.nodes[k].support[a] ? -1 : static_cast<std::int32_t>(nf++);
  nf_ = nf;
  // Suppressed DOFs read from the trailing zero slot of u_.
  for (auto& d : dof_)
    if (d < 0) d = static_cast<std::int32_t>(nf_);

  const std::size_t nm = p.members.size();
  coef_.resize(nm);
  for (int a = 0; a < 3; ++a) {
    dir_[a].resize(nm);
    end1_[a].resize(nm);
    end2_[a].resize(nm);
  }
  for (std::size_t m = 0; m < nm; ++m) {
    const Member& mem = p.members[m];
    const Node3D& n1 = p.node(mem.ends[0]);
    const Node3D& n2 = p.node(mem.ends[1]);
    coef_[m] = p.material.elastic_modulus / mem.length;
    for (int a = 0; a < 3; ++a) {
      dir_[a][m] = (n2.coords[a] - n1.coords[a]) / mem.length;
      end1_[a][m] = dof_[3 * (static_cast<std::size_t>(mem.ends[0]) - 1) + a];
      end2_[a][m] = dof_[3 * (static_cast<std::size_t>(mem.ends[1]) - 1) + a];
    }
  }

  const std::size_t ncase = p.load_cases.size();
  f_free_.assign(ncase * nf_, 0.0);
  for (std::size_t ci = 0; ci < ncase; ++ci)
    for (const auto& [nid, f] : p.load_cases[ci].forces)
      for (int a = 0; a < 3; ++a) {
        const std::int32_t d = dof_[3 * (static_cast<std::size_t>(nid) - 1) + a];
        if (d < static_cast<std::int32_t>(nf_)) f_free_[ci * nf_ + d] += f[a];
      }

  k_.assign(nf_ * nf_, 0.0);
  u_.assign(ncase * (nf_ + 1), 0.0);
  stress_.assign(nm, 0.0);
}

void Analyzer::assemble(std::span<const double> areas) {
  std::fill(k_.begin(), k_.end(), 0.0);
  const std::size_t nm = problem_->members.size();
  const std::int32_t nf = static_cast<std::int32_t>(nf_);
  for (std::size_t m = 0; m < nm; ++m) {
    const double ke =
        coef_[m] * areas[static_cast<std::size_t>(problem_->members[m].group)];
    const double v[6] = {-dir_[0][m], -dir_[1][m], -dir_[2][m],
                         dir_[0][m],  dir_[1][m],  dir_[2][m]};
    const std::int32_t d[6] = {end1_[0][m], end1_[1][m], end1_[2][m],
                               end2_[0][m], end2_[1][m], end2_[2][m]};
    for (int i = 0; i < 6; ++i) {
      if (d[i] >= nf) continue;
      double* row = k_.data() + static_cast<std::size_t>(d[i]) * nf_;
      const double kvi = ke * v[i];
      for (int j = 0; j < 6; ++j)
        if (d[j] < nf) row[d[j]] += kvi * v[j];
    }
  }
}

std::span<const double> Analyzer::stiffness() const { return k_; }

bool Analyzer::factor_and_solve() {
  const auto& kr = kernels::active();
  bad_pivot_ = kr.cholesky_factor(k_.data(), nf_);
  if (bad_pivot_ >= 0) return false;
  const std::size_t ncase = problem_->load_cases.size();
  const double* L = k_.data();
  for (std::size_t ci = 0; ci < ncase; ++ci) {
    double* u = u_.data() + ci * (nf_ + 1);
    const double* f = f_free_.data() + ci * nf_;
    // forward substitution: L y = f (rows of L are contiguous)
    for (std::size_t i = 0; i < nf_; ++i)
      u[i] = (f[i] - kr.dot(L + i * nf_, u, i)) / L[i * nf_ + i];
    // back substitution: L^T x = y
    for (std::size_t ii = nf_; ii-- > 0;) {
      double s = u[ii];
      for (std::size_t j = ii + 1; j < nf_; ++j) s -= L[j * nf_ + ii] * u[j];
      u[ii] = s / L[ii * nf_ + ii];
    }
    u[nf_] = 0.0;  // zero sink for suppressed DOFs
  }
  return true;
}

double Analyzer::case_violation(std::size_t ci) {
  const auto& kr = kernels::active();
  const double* u = u_.data() + ci * (nf_ + 1);
  kernels::StressBatch batch;
  batch.count = problem_->members.size();
  batch.coef = coef_.data();
  for (int a = 0; a < 3; ++a) {
    batch.dir[a] = dir_[a].data();
    batch.end1[a] = end1_[a].data();
    batch.end2[a] = end2_[a].data();
  }
  kr.member_stress(batch, u, stress_.data());
  const double rs =
      kr.range_ratio_max(stress_.data(), stress_.size(),
                         1.0 / problem_->limits.stress_min,
                         1.0 / problem_->limits.stress_max);
  const double rd = kr.range_ratio_max(u, nf_, 1.0 / problem_->limits.disp_min,
                                       1.0 / problem_->limits.disp_max);
  return std::max(rs, rd);
}

QuickResult Analyzer::evaluate(std::span<const double> areas) {
  ++evaluations_;
  QuickResult q;
  q.weight = total_weight(*problem_, areas);
  assemble(areas);
  if (!factor_and_solve()) {
    q.stable = false;
    q.feasible = false;
    q.violation = std::numeric_limits<double>::infinity();
    return q;
  }
  double ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t ci = 0; ci < problem_->load_cases.size(); ++ci)
    ratio = std::max(ratio, case_violation(ci));
  q.violation = ratio - 1.0;
  q.feasible = ratio <= 1.0 + kFeasibilitySlack;
  return q;
}

AnalysisResult Analyzer::analyze(std::span<const double> areas) {
  validate_assignment(*problem_, areas);
  ++evaluations_;
  AnalysisResult r;
  r.weight = total_weight(*problem_, areas);
  assemble(areas);
  if (!factor_and_solve()) {
    const std::size_t bad = static_cast<std::size_t>(bad_pivot_);
    // map the failing free-DOF back to (node, axis)
    const char axis_name[3] = {'x', 'y', 'z'};
    for (std::size_t k = 0; k < problem_->nodes.size(); ++k)
      for (int a = 0; a < 3; ++a)
        if (dof_[3 * k + a] == static_cast<std::int32_t>(bad)) {
          std::ostringstream msg;
          msg << "unstable structure: near-null direction at node " << (k + 1)
              << ", axis " << axis_name[a];
          throw AnalysisError(msg.str());
        }
    throw AnalysisError("unstable structure");
  }

  const std::size_t c = problem_->nodes.size();
  const std::size_t nm = problem_->members.size();
  const std::size_t ncase = problem_->load_cases.size();
  double ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t ci = 0; ci < ncase; ++ci) {
    ratio = std::max(ratio, case_violation(ci));
    const double* u = u_.data() + ci * (nf_ + 1);
    std::vector<double> disp(3 * c, 0.0);
    for (std::size_t k = 0; k < 3 * c; ++k)
      if (dof_[k] < static_cast<std::int32_t>(nf_)) disp[k] = u[dof_[k]];
    r.displacements.push_back(std::move(disp));
    r.stresses.emplace_back(stress_.begin(), stress_.end());

    // Reactions at supported DOFs: sum of member end forces minus any load
    // applied directly at the support.
    std::vector<std::array<double, 3>> reac(c, {0.0, 0.0, 0.0});
    for (std::size_t m = 0; m < nm; ++m) {
      const Member& mem = problem_->members[m];
      const double axial =
          stress_[m] * areas[static_cast<std::size_t>(mem.group)];
      for (int a = 0; a < 3; ++a) {
        const std::size_t k1 = static_cast<std::size_t>(mem.ends[0]) - 1;
        const std::size_t k2 = static_cast<std::size_t>(mem.ends[1]) - 1;
        if (problem_->nodes[k1].support[a])
          reac[k1][a] -= axial * dir_[a][m];
        if (problem_->nodes[k2].support[a])
          reac[k2][a] += axial * dir_[a][m];
      }
    }
    for (const auto& [nid, f] : problem_->load_cases[ci].forces)
      for (int a = 0; a < 3; ++a)
        if (problem_->nodes[static_cast<std::size_t>(nid) - 1].support[a])
          reac[static_cast<std::size_t>(nid) - 1][a] -= f[a];
    r.reactions.push_back(std::move(reac));
  }
  r.violation = ratio - 1.0;
  r.feasible = ratio <= 1.0 + kFeasibilitySlack;
  return r;
}

double total_weight(const TrussProblem& p, std::span<const double> areas) {
  return p.material.density *
         kernels::active().dot(areas.data(), p.group_lengths.data(),
                               p.group_lengths.size());
}

double alpha_weight(const TrussProblem& p) {
  const std::vector<double> a(p.group_count(), p.catalog.min_area());
  return total_weight(p, a);
}

double max_weight(const TrussProblem& p) {
  const std::vector<double> a(p.group_count(), p.catalog.max_area());
  return total_weight(p, a);
}

AnalysisResult solve(const TrussProblem& p, std::span<const double> areas) {
  Analyzer an(p);
  return an.analyze(areas);
}

void validate_assignment(const TrussProblem& p,
                         std::span<const double> areas) {
  if (areas.size() != p.group_count())
    throw ValidationError("assignment has " + std::to_string(areas.size()) +
                          " areas, problem has " +
                          std::to_string(p.group_count()) + " groups");
  for (std::size_t i = 0; i < areas.size(); ++i)
    p.catalog.index_of(areas[i]);  // throws if not a catalog value
}

void write_analysis_csv(const TrussProblem& p, std::span<const double> areas,
                        const AnalysisResult& r, std::ostream& out) {
  out << "record,id,group,length_m,area_mm2";
  for (std::size_t ci = 0; ci < r.stresses.size(); ++ci)
    out << ",case" << (ci + 1) << "_stress_mpa";
  out << '\n';
  for (std::size_t m = 0; m < p.members.size(); ++m) {
    const Member& mem = p.members[m];
    out << "member," << mem.id << ',' << (mem.group + 1) << ',' << mem.length
        << ',' << areas[static_cast<std::size_t>(mem.group)] * units::m2_to_mm2;
    for (std::size_t ci = 0; ci < r.stresses.size(); ++ci)
      out << ',' << r.stresses[ci][m] / units::mpa_to_pa;
    out << '\n';
  }
  out << "record,id,axis";
  for (std::size_t ci = 0; ci < r.displacements.size(); ++ci)
    out << ",case" << (ci + 1) << "_disp_mm";
  out << '\n';
  const char axis_name[3] = {'x', 'y', 'z'};
  for (std::size_t k = 0; k < p.nodes.size(); ++k)
    for (int a = 0; a < 3; ++a) {
      out << "node," << (k + 1) << ',' << axis_name[a];
      for (std::size_t ci = 0; ci < r.displacements.size(); ++ci)
        out << ',' << r.displacements[ci][3 * k + a] * units::m_to_mm;
      out << '\n';
    }
}

}  // namespace trussopt::fem
