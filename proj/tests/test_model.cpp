#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "test_util.hpp"
#include "trussopt/model.hpp"

using namespace trussopt;
using trussopt::test::data_path;

TEST_CASE("ten bar benchmark loads with the published parameters") {
  const TrussProblem p = load_problem(data_path("benchmarks/ten_bar_case1.json"));
  CHECK(p.group_count() == 10);
  CHECK(p.nodes.size() == 6);
  CHECK(p.catalog.size() == 42);
  CHECK(p.material.density == doctest::Approx(2767.99));
  CHECK(p.material.elastic_modulus == doctest::Approx(68.95e9));
  CHECK(p.limits.stress_max == doctest::Approx(172.37e6));
  CHECK(p.limits.stress_min == doctest::Approx(-172.37e6));
  CHECK(p.limits.disp_max == doctest::Approx(50.80e-3));
  CHECK(p.limits.disp_min == doctest::Approx(-50.80e-3));
  for (const auto& g : p.groups) CHECK(g.size() == 1);  // no grouping
  CHECK(p.load_cases.size() == 1);
}

TEST_CASE("seventy-two bar benchmark matches the published grouping") {
  const TrussProblem p =
      load_problem(data_path("benchmarks/seventy_two_bar_case1.json"));
  CHECK(p.group_count() == 16);
  CHECK(p.members.size() == 72);
  CHECK(p.nodes.size() == 20);
  CHECK(p.catalog.size() == 32);
  CHECK(p.catalog.max_area() == doctest::Approx(2064.00e-6));
  // per-story pattern: 4 columns, 8 diagonals, 4 horizontals, 2 plan braces
  const std::size_t expected[] = {4, 8, 4, 2};
  for (std::size_t i = 0; i < 16; ++i)
    CHECK(p.groups[i].size() == expected[i % 4]);
  // group 1 is members 1-4, group 2 is 5-12 and so on, contiguous
  int next_id = 1;
  for (const auto& g : p.groups)
    for (int mid : g) CHECK(mid == next_id++);
  CHECK(p.load_cases.size() == 2);
  CHECK(p.limits.disp_max == doctest::Approx(6.35e-3));
}

TEST_CASE("case 2 catalogs") {
  const TrussProblem c2 = load_problem(data_path("benchmarks/ten_bar_case2.json"));
  CHECK(c2.catalog.size() == 64);
  CHECK(c2.catalog.min_area() == doctest::Approx(64.52e-6));
  CHECK(c2.catalog.max_area() == doctest::Approx(20323.80e-6));
  const TrussProblem aisc =
      load_problem(data_path("benchmarks/seventy_two_bar_case2.json"));
  CHECK(aisc.catalog.size() == 64);
  CHECK(aisc.catalog.min_area() == doctest::Approx(71.61e-6));
  CHECK(aisc.catalog.max_area() == doctest::Approx(21612.86e-6));
}

TEST_CASE("minimal two-member instance") {
  const TrussProblem p = load_problem(data_path("benchmarks/two_bar.json"));
  CHECK(p.group_count() == 2);
  CHECK(p.nodes.size() == 3);
  CHECK(p.members[0].length == doctest::Approx(2.5));
  CHECK(p.members[1].length == doctest::Approx(2.5));
}

TEST_CASE("arithmetic catalog") {
  const Catalog c1 = Catalog::arithmetic(64.50, 64.50, 32);
  CHECK(c1.size() == 32);
  CHECK(c1.max_area() == doctest::Approx(2064.00e-6));
  const Catalog c3 = Catalog::arithmetic(64.50, 64.50, 25);
  CHECK(c3.max_area() == doctest::Approx(1612.50e-6));
  const Catalog tiny = Catalog::arithmetic(1.0, 1.0, 2);
  CHECK(tiny[0] == doctest::Approx(1.0e-6));
  CHECK(tiny[1] == doctest::Approx(2.0e-6));
  CHECK_THROWS_AS(Catalog::arithmetic(0.0, 1.0, 5), ValidationError);
  CHECK_THROWS_AS(Catalog::arithmetic(1.0, -1.0, 5), ValidationError);
  CHECK_THROWS_AS(Catalog::arithmetic(1.0, 1.0, 1), ValidationError);
}

TEST_CASE("catalog index lookup is a bijection") {
  const TrussProblem p = load_problem(data_path("benchmarks/ten_bar_case1.json"));
  for (std::size_t h = 0; h < p.catalog.size(); ++h)
    CHECK(p.catalog.index_of(p.catalog[h]) == h);
  // survives a round trip through mm2
  for (std::size_t h = 0; h < p.catalog.size(); ++h) {
    const double mm2 = p.catalog[h] * units::m2_to_mm2;
    CHECK(p.catalog.index_of(mm2 * units::mm2_to_m2) == h);
  }
  CHECK_THROWS_AS(p.catalog.index_of(1234.5e-6), ValidationError);
}

TEST_CASE("member length") {
  const Node3D a{1, {0, 0, 0}, {}};
  const Node3D b{2, {1, 0, 0}, {}};
  CHECK(member_length(a, b) == doctest::Approx(1.0));
  const Node3D c{3, {3, 4, 0}, {}};
  CHECK(member_length(a, c) == doctest::Approx(5.0));
  // bay diagonal of the ten-bar geometry: 9.144 * sqrt(2)
  const Node3D d{4, {9.144, 9.144, 0}, {}};
  CHECK(member_length(a, d) ==
        doctest::Approx(12.931568814339581).epsilon(1e-12));
  CHECK(member_length(a, d) == doctest::Approx(std::hypot(9.144, 9.144)));
  const Node3D dup{5, {0, 0, 0}, {}};
  CHECK_THROWS_AS(member_length(a, dup), ValidationError);
}

namespace {

std::string patched(const std::string& json, const std::string& from,
                    const std::string& to) {
  std::string s = json;
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  s.replace(pos, from.size(), to);
  return s;
}

const char* kMinimal = R"({
  "name": "t",
  "nodes": [
    {"id": 1, "coords": [0, 0, 0], "support": [true, true, true]},
    {"id": 2, "coords": [4, 0, 0], "support": [true, true, true]},
    {"id": 3, "coords": [2, 1.5, 0], "support": [false, false, true]}
  ],
  "members": [{"id": 1, "ends": [1, 3]}, {"id": 2, "ends": [3, 2]}],
  "groups": [[1], [2]],
  "load_cases": [{"forces": {"3": [100, -150, 0]}}],
  "material": {"density": 7850, "elastic_modulus": 200},
  "limits": {"stress": [-150, 150], "displacement": [-4, 4]},
  "catalog": [500, 1000, 1500]
})";

}  // namespace

TEST_CASE("validation names the offending entity") {
  CHECK_NOTHROW(parse_problem(kMinimal));

  SUBCASE("dangling node id") {
    const auto bad = patched(kMinimal, "\"ends\": [1, 3]", "\"ends\": [1, 9]");
    CHECK_THROWS_WITH_AS(parse_problem(bad),
                         doctest::Contains("missing node 9"), ValidationError);
  }
  SUBCASE("non-ascending catalog") {
    const auto bad =
        patched(kMinimal, "[500, 1000, 1500]", "[500, 1500, 1000]");
    CHECK_THROWS_WITH_AS(parse_problem(bad), doctest::Contains("ascending"),
                         ValidationError);
  }
  SUBCASE("empty group") {
    const auto bad = patched(kMinimal, "[[1], [2]]", "[[1, 2], []]");
    CHECK_THROWS_WITH_AS(parse_problem(bad),
                         doctest::Contains("group 2 is empty"),
                         ValidationError);
  }
  SUBCASE("member missing from every group") {
    const auto bad = patched(kMinimal, "[[1], [2]]", "[[1]]");
    CHECK_THROWS_WITH_AS(parse_problem(bad),
                         doctest::Contains("member 2 is not assigned"),
                         ValidationError);
  }
  SUBCASE("planar problem must fix z") {
    const auto bad = patched(kMinimal, "[false, false, true]",
                             "[false, false, false]");
    CHECK_THROWS_WITH_AS(parse_problem(bad), doctest::Contains("node 3"),
                         ValidationError);
  }
  SUBCASE("load case without force") {
    const auto bad =
        patched(kMinimal, "{\"3\": [100, -150, 0]}", "{\"3\": [0, 0, 0]}");
    CHECK_THROWS_WITH_AS(parse_problem(bad),
                         doctest::Contains("applies no force"),
                         ValidationError);
  }
  SUBCASE("malformed json is a parse error") {
    CHECK_THROWS_AS(parse_problem("{nope"), ParseError);
  }
}

TEST_CASE("save/load round trip preserves every field") {
  const TrussProblem p = load_problem(data_path("benchmarks/ten_bar_case2.json"));
  const auto tmp =
      std::filesystem::temp_directory_path() / "trussopt_roundtrip.json";
  save_problem(p, tmp.string());
  const TrussProblem q = load_problem(tmp.string());
  std::filesystem::remove(tmp);

  CHECK(q.name == p.name);
  REQUIRE(q.nodes.size() == p.nodes.size());
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    CHECK(q.nodes[i].id == p.nodes[i].id);
    for (int a = 0; a < 3; ++a) {
      CHECK(q.nodes[i].coords[a] == doctest::Approx(p.nodes[i].coords[a]));
      CHECK(q.nodes[i].support[a] == p.nodes[i].support[a]);
    }
  }
  REQUIRE(q.members.size() == p.members.size());
  for (std::size_t i = 0; i < p.members.size(); ++i) {
    CHECK(q.members[i].ends == p.members[i].ends);
    CHECK(q.members[i].group == p.members[i].group);
  }
  CHECK(q.groups == p.groups);
  REQUIRE(q.catalog.size() == p.catalog.size());
  for (std::size_t h = 0; h < p.catalog.size(); ++h)
    CHECK(std::abs(q.catalog[h] - p.catalog[h]) <= 0.01 * units::mm2_to_m2);
  REQUIRE(q.load_cases.size() == p.load_cases.size());
  for (std::size_t c = 0; c < p.load_cases.size(); ++c) {
    REQUIRE(q.load_cases[c].forces.size() == p.load_cases[c].forces.size());
    for (std::size_t k = 0; k < p.load_cases[c].forces.size(); ++k) {
      CHECK(q.load_cases[c].forces[k].first == p.load_cases[c].forces[k].first);
      for (int a = 0; a < 3; ++a)
        CHECK(q.load_cases[c].forces[k].second[a] ==
              doctest::Approx(p.load_cases[c].forces[k].second[a]));
    }
  }
  CHECK(q.material.density == doctest::Approx(p.material.density));
  CHECK(q.material.elastic_modulus ==
        doctest::Approx(p.material.elastic_modulus));
  CHECK(q.limits.stress_max == doctest::Approx(p.limits.stress_max));
  CHECK(q.limits.disp_min == doctest::Approx(p.limits.disp_min));
}
