#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "trussopt/errors.hpp"

namespace trussopt {

// Everything is stored in SI internally (m, m2, N, Pa, kg/m3). Problem files
// use the units customary in the truss-sizing literature (mm2, kN, GPa, MPa,
// mm) and are converted on load.
namespace units {
inline constexpr double mm2_to_m2 = 1e-6;
inline constexpr double m2_to_mm2 = 1e6;
inline constexpr double gpa_to_pa = 1e9;
inline constexpr double mpa_to_pa = 1e6;
inline constexpr double kn_to_n = 1e3;
inline constexpr double n_to_kn = 1e-3;
inline constexpr double mm_to_m = 1e-3;
inline constexpr double m_to_mm = 1e3;
}  // namespace units

struct Node3D {
  int id = 0;                      // 1-based, contiguous
  std::array<double, 3> coords{};  // m
  std::array<bool, 3> support{};   // true = degree of freedom suppressed
};

struct Member {
  int id = 0;                  // 1-based, contiguous
  int group = -1;              // 0-based group index
  std::array<int, 2> ends{};   // node ids
  double length = 0.0;         // m, computed on load
};

struct LoadCase {
  // node id -> force components in N, sorted by node id
  std::vector<std::pair<int, std::array<double, 3>>> forces;
};

struct Material {
  double density = 0.0;          // kg/m3
  double elastic_modulus = 0.0;  // Pa
};

struct Limits {
  double stress_min = 0.0;  // Pa, negative
  double stress_max = 0.0;  // Pa, positive
  double disp_min = 0.0;    // m, negative
  double disp_max = 0.0;    // m, positive
};

// Ascending list of permitted cross-sectional areas.
class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<double> areas_m2);

  // Areas given in mm2, as they appear in problem files.
  static Catalog arithmetic(double start_mm2, double step_mm2,
                            std::size_t count);

  std::size_t size() const { return areas_.size(); }
  double operator[](std::size_t h) const { return areas_[h]; }
  const std::vector<double>& areas() const { return areas_; }
  double min_area() const { return areas_.front(); }
  double max_area() const { return areas_.back(); }

  // Inverse of operator[]; tolerant to round-tripping through mm2.
  std::size_t index_of(double area_m2) const;

 private:
  std::vector<double> areas_;  // m2
};

struct TrussProblem {
  std::string name;
  std::vector<Node3D> nodes;
  std::vector<Member> members;
  std::vector<std::vector<int>> groups;  // member ids per group
  std::vector<LoadCase> load_cases;
  Material material;
  Limits limits;
  Catalog catalog;
  std::vector<double> group_lengths;  // m, summed over the group's members

  std::size_t group_count() const { return groups.size(); }
  const Node3D& node(int id) const { return nodes[static_cast<std::size_t>(id) - 1]; }
};

// Euclidean distance; throws ValidationError on coincident endpoints.
double member_length(const Node3D& a, const Node3D& b);

TrussProblem load_problem(const std::string& path);
TrussProblem parse_problem(const std::string& json_text,
                           const std::string& origin = "<memory>");
void save_problem(const TrussProblem& p, const std::string& path);
std::string problem_to_json(const TrussProblem& p);

// Structural validation; also computes the derived fields (member lengths,
// group ownership, per-group total lengths). load_problem/parse_problem call
// this, so loaded problems arrive fully validated.
void validate(TrussProblem& p);

}  // namespace trussopt
