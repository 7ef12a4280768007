#include "trussopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace trussopt {

using nlohmann::json;

Catalog::Catalog(std::vector<double> areas_m2) : areas_(std::move(areas_m2)) {
  if (areas_.size() < 2)
    throw ValidationError("catalog must list at least 2 areas");
  for (std::size_t h = 0; h < areas_.size(); ++h) {
    if (!(areas_[h] > 0.0))
      throw ValidationError("catalog entry " + std::to_string(h + 1) +
                            " is not positive");
    if (h > 0 && !(areas_[h] > areas_[h - 1]))
      throw ValidationError("catalog is not strictly ascending at entry " +
                            std::to_string(h + 1));
  }
}

Catalog Catalog::arithmetic(double start_mm2, double step_mm2,
                            std::size_t count) {
  if (!(start_mm2 > 0.0) || !(step_mm2 > 0.0) || count < 2)
    throw ValidationError(
        "arithmetic catalog requires start > 0, step > 0, count >= 2");
  std::vector<double> areas(count);
  for (std::size_t k = 0; k < count; ++k)
    areas[k] = (start_mm2 + static_cast<double>(k) * step_mm2) *
               units::mm2_to_m2;
  return Catalog(std::move(areas));
}

std::size_t Catalog::index_of(double area_m2) const {
  auto it = std::lower_bound(areas_.begin(), areas_.end(), area_m2);
  const double tol = 1e-9 * std::max(std::abs(area_m2), 1e-12);
  if (it != areas_.end() && std::abs(*it - area_m2) <= tol)
    return static_cast<std::size_t>(it - areas_.begin());
  if (it != areas_.begin() && std::abs(*(it - 1) - area_m2) <= tol)
    return static_cast<std::size_t>(it - areas_.begin()) - 1;
  std::ostringstream msg;
  msg << "area " << area_m2 * units::m2_to_mm2 << " mm2 is not in the catalog";
  throw ValidationError(msg.str());
}

double member_length(const Node3D& a, const Node3D& b) {
  const double dx = b.coords[0] - a.coords[0];
  const double dy = b.coords[1] - a.coords[1];
  const double dz = b.coords[2] - a.coords[2];
  const double len = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (!(len > 0.0))
    throw ValidationError("zero-length member between nodes " +
                          std::to_string(a.id) + " and " + std::to_string(b.id));
  return len;
}

namespace {

double get_num(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number())
    throw ParseError(ctx + ": missing or non-numeric \"" + key + "\"");
  return j[key].get<double>();
}

Catalog parse_catalog(const json& j) {
  if (j.is_array()) {
    std::vector<double> areas;
    areas.reserve(j.size());
    for (const auto& v : j) {
      if (!v.is_number()) throw ParseError("catalog: non-numeric entry");
      areas.push_back(v.get<double>() * units::mm2_to_m2);
    }
    return Catalog(std::move(areas));
  }
  if (j.is_object()) {
    const double start = get_num(j, "start", "catalog");
    const double step = get_num(j, "step", "catalog");
    if (!j.contains("count") || !j["count"].is_number_integer())
      throw ParseError("catalog: missing integer \"count\"");
    return Catalog::arithmetic(start, step, j["count"].get<std::size_t>());
  }
  throw ParseError("catalog must be an array of mm2 areas or {start, step, count}");
}

}  // namespace

TrussProblem parse_problem(const std::string& json_text,
                           const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }

  TrussProblem p;
  p.name = root.value("name", std::string{});

  if (!root.contains("nodes") || !root["nodes"].is_array())
    throw ParseError(origin + ": missing \"nodes\" array");
  for (const auto& jn : root["nodes"]) {
    Node3D n;
    if (!jn.contains("id") || !jn["id"].is_number_integer())
      throw ParseError(origin + ": node without integer id");
    n.id = jn["id"].get<int>();
    const std::string ctx = "node " + std::to_string(n.id);
    if (!jn.contains("coords") || !jn["coords"].is_array() ||
        jn["coords"].size() != 3)
      throw ParseError(origin + ": " + ctx + " needs coords [x, y, z]");
    for (int a = 0; a < 3; ++a) n.coords[a] = jn["coords"][a].get<double>();
    if (jn.contains("support")) {
      if (!jn["support"].is_array() || jn["support"].size() != 3)
        throw ParseError(origin + ": " + ctx + " support must be [bool, bool, bool]");
      for (int a = 0; a < 3; ++a) n.support[a] = jn["support"][a].get<bool>();
    }
    p.nodes.push_back(n);
  }

  if (!root.contains("members") || !root["members"].is_array())
    throw ParseError(origin + ": missing \"members\" array");
  for (const auto& jm : root["members"]) {
    Member m;
    if (!jm.contains("id") || !jm["id"].is_number_integer())
      throw ParseError(origin + ": member without integer id");
    m.id = jm["id"].get<int>();
    if (!jm.contains("ends") || !jm["ends"].is_array() || jm["ends"].size() != 2)
      throw ParseError(origin + ": member " + std::to_string(m.id) +
                       " needs ends [n1, n2]");
    m.ends[0] = jm["ends"][0].get<int>();
    m.ends[1] = jm["ends"][1].get<int>();
    p.members.push_back(m);
  }

  if (!root.contains("groups") || !root["groups"].is_array())
    throw ParseError(origin + ": missing \"groups\" array");
  for (const auto& jg : root["groups"]) {
    if (!jg.is_array()) throw ParseError(origin + ": group must be a member-id list");
    std::vector<int> ids;
    for (const auto& v : jg) ids.push_back(v.get<int>());
    p.groups.push_back(std::move(ids));
  }

  if (!root.contains("load_cases") || !root["load_cases"].is_array())
    throw ParseError(origin + ": missing \"load_cases\" array");
  for (const auto& jc : root["load_cases"]) {
    LoadCase lc;
    if (!jc.contains("forces") || !jc["forces"].is_object())
      throw ParseError(origin + ": load case needs a \"forces\" object");
    for (const auto& [key, val] : jc["forces"].items()) {
      int node_id = 0;
      try {
        node_id = std::stoi(key);
      } catch (...) {
        throw ParseError(origin + ": load-case key \"" + key +
                         "\" is not a node id");
      }
      if (!val.is_array() || val.size() != 3)
        throw ParseError(origin + ": forces for node " + key +
                         " must be [Fx, Fy, Fz] in kN");
      std::array<double, 3> f{};
      for (int a = 0; a < 3; ++a) f[a] = val[a].get<double>() * units::kn_to_n;
      lc.forces.emplace_back(node_id, f);
    }
    std::sort(lc.forces.begin(), lc.forces.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    p.load_cases.push_back(std::move(lc));
  }

  if (!root.contains("material") || !root["material"].is_object())
    throw ParseError(origin + ": missing \"material\" object");
  p.material.density = get_num(root["material"], "density", "material");
  p.material.elastic_modulus =
      get_num(root["material"], "elastic_modulus", "material") *
      units::gpa_to_pa;

  if (!root.contains("limits") || !root["limits"].is_object())
    throw ParseError(origin + ": missing \"limits\" object");
  const json& jl = root["limits"];
  auto pair_of = [&](const char* key) -> std::array<double, 2> {
    if (!jl.contains(key) || !jl[key].is_array() || jl[key].size() != 2)
      throw ParseError(origin + ": limits." + key + " must be [min, max]");
    return {jl[key][0].get<double>(), jl[key][1].get<double>()};
  };
  const auto s = pair_of("stress");
  const auto d = pair_of("displacement");
  p.limits.stress_min = s[0] * units::mpa_to_pa;
  p.limits.stress_max = s[1] * units::mpa_to_pa;
  p.limits.disp_min = d[0] * units::mm_to_m;
  p.limits.disp_max = d[1] * units::mm_to_m;

  if (!root.contains("catalog"))
    throw ParseError(origin + ": missing \"catalog\"");
  p.catalog = parse_catalog(root["catalog"]);

  validate(p);
  return p;
}

TrussProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open problem file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str(), path);
}

void validate(TrussProblem& p) {
  if (p.nodes.empty()) throw ValidationError("problem has no nodes");
  const int c = static_cast<int>(p.nodes.size());
  std::set<int> seen;
  for (const auto& n : p.nodes) {
    if (n.id < 1 || n.id > c)
      throw ValidationError("node id " + std::to_string(n.id) +
                            " is outside 1.." + std::to_string(c));
    if (!seen.insert(n.id).second)
      throw ValidationError("duplicate node id " + std::to_string(n.id));
  }
  std::sort(p.nodes.begin(), p.nodes.end(),
            [](const Node3D& a, const Node3D& b) { return a.id < b.id; });

  // A planar problem (all nodes in one z plane) must suppress z everywhere,
  // otherwise the stiffness matrix is structurally singular.
  bool planar = true;
  for (const auto& n : p.nodes)
    if (n.coords[2] != p.nodes.front().coords[2]) planar = false;
  if (planar) {
    for (const auto& n : p.nodes)
      if (!n.support[2])
        throw ValidationError("planar problem: node " + std::to_string(n.id) +
                              " must fix the z degree of freedom");
  }

  if (p.members.empty()) throw ValidationError("problem has no members");
  const int nm = static_cast<int>(p.members.size());
  seen.clear();
  for (auto& m : p.members) {
    if (m.id < 1 || m.id > nm)
      throw ValidationError("member id " + std::to_string(m.id) +
                            " is outside 1.." + std::to_string(nm));
    if (!seen.insert(m.id).second)
      throw ValidationError("duplicate member id " + std::to_string(m.id));
    for (int e : m.ends)
      if (e < 1 || e > c)
        throw ValidationError("member " + std::to_string(m.id) +
                              " references missing node " + std::to_string(e));
    if (m.ends[0] == m.ends[1])
      throw ValidationError("member " + std::to_string(m.id) +
                            " connects node " + std::to_string(m.ends[0]) +
                            " to itself");
  }
  std::sort(p.members.begin(), p.members.end(),
            [](const Member& a, const Member& b) { return a.id < b.id; });

  if (p.groups.empty()) throw ValidationError("problem has no groups");
  std::vector<int> owner(static_cast<std::size_t>(nm), -1);
  for (std::size_t gi = 0; gi < p.groups.size(); ++gi) {
    if (p.groups[gi].empty())
      throw ValidationError("group " + std::to_string(gi + 1) + " is empty");
    for (int mid : p.groups[gi]) {
      if (mid < 1 || mid > nm)
        throw ValidationError("group " + std::to_string(gi + 1) +
                              " references missing member " +
                              std::to_string(mid));
      if (owner[static_cast<std::size_t>(mid) - 1] != -1)
        throw ValidationError("member " + std::to_string(mid) +
                              " appears in more than one group");
      owner[static_cast<std::size_t>(mid) - 1] = static_cast<int>(gi);
    }
  }
  for (int mid = 1; mid <= nm; ++mid)
    if (owner[static_cast<std::size_t>(mid) - 1] == -1)
      throw ValidationError("member " + std::to_string(mid) +
                            " is not assigned to any group");
  for (auto& m : p.members) m.group = owner[static_cast<std::size_t>(m.id) - 1];

  p.group_lengths.assign(p.groups.size(), 0.0);
  for (auto& m : p.members) {
    m.length = member_length(p.node(m.ends[0]), p.node(m.ends[1]));
    p.group_lengths[static_cast<std::size_t>(m.group)] += m.length;
  }

  if (p.load_cases.empty()) throw ValidationError("problem has no load cases");
  for (std::size_t ci = 0; ci < p.load_cases.size(); ++ci) {
    bool nonzero = false;
    for (const auto& [nid, f] : p.load_cases[ci].forces) {
      if (nid < 1 || nid > c)
        throw ValidationError("load case " + std::to_string(ci + 1) +
                              " references missing node " +
                              std::to_string(nid));
      for (double v : f)
        if (v != 0.0) nonzero = true;
    }
    if (!nonzero)
      throw ValidationError("load case " + std::to_string(ci + 1) +
                            " applies no force");
  }

  if (!(p.material.density > 0.0) || !(p.material.elastic_modulus > 0.0))
    throw ValidationError("material constants must be positive");
  if (!(p.limits.stress_min < 0.0 && p.limits.stress_max > 0.0))
    throw ValidationError("stress limits must satisfy min < 0 < max");
  if (!(p.limits.disp_min < 0.0 && p.limits.disp_max > 0.0))
    throw ValidationError("displacement limits must satisfy min < 0 < max");
  if (p.catalog.size() < 2) throw ValidationError("catalog too small");
}

namespace {

// Emit with enough digits to round-trip doubles exactly.
json num(double v) { return json(v); }

}  // namespace

std::string problem_to_json(const TrussProblem& p) {
  json root;
  root["name"] = p.name;
  root["nodes"] = json::array();
  for (const auto& n : p.nodes) {
    json jn;
    jn["id"] = n.id;
    jn["coords"] = {num(n.coords[0]), num(n.coords[1]), num(n.coords[2])};
    jn["support"] = {n.support[0], n.support[1], n.support[2]};
    root["nodes"].push_back(jn);
  }
  root["members"] = json::array();
  for (const auto& m : p.members) {
    json jm;
    jm["id"] = m.id;
    jm["ends"] = {m.ends[0], m.ends[1]};
    root["members"].push_back(jm);
  }
  root["groups"] = p.groups;
  root["load_cases"] = json::array();
  for (const auto& lc : p.load_cases) {
    json forces = json::object();
    for (const auto& [nid, f] : lc.forces)
      forces[std::to_string(nid)] = {num(f[0] * units::n_to_kn),
                                     num(f[1] * units::n_to_kn),
                                     num(f[2] * units::n_to_kn)};
    root["load_cases"].push_back({{"forces", forces}});
  }
  root["material"] = {{"density", p.material.density},
                      {"elastic_modulus",
                       p.material.elastic_modulus / units::gpa_to_pa}};
  root["limits"] = {
      {"stress",
       {num(p.limits.stress_min / units::mpa_to_pa),
        num(p.limits.stress_max / units::mpa_to_pa)}},
      {"displacement",
       {num(p.limits.disp_min * units::m_to_mm),
        num(p.limits.disp_max * units::m_to_mm)}}};
  json cat = json::array();
  for (double a : p.catalog.areas()) cat.push_back(num(a * units::m2_to_mm2));
  root["catalog"] = cat;
  return root.dump(2);
}

void save_problem(const TrussProblem& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write problem file: " + path);
  out << problem_to_json(p) << '\n';
}

}  // namespace trussopt
