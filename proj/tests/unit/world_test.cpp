#include <algorithm>

#include "doctest.h"
#include "mvplan/errors.hpp"
#include "mvplan/world.hpp"

using namespace mvplan;

TEST_CASE("walled-off region is rejected") {
  // (3,3) is boxed in by obstacles.
  std::vector<Cell> wall = {{2, 2}, {3, 2}, {4, 2}, {2, 3}, {4, 3}, {2, 4}, {3, 4}, {4, 4}};
  CHECK_THROWS_AS(WorldModel(5, 5, wall, {{"a", {0, 0}}, {"b", {3, 3}}}, 1, 1), RegionInaccessible);
  CHECK_THROWS_AS(WorldModel(5, 5, {{1, 1}}, {{"a", {1, 1}}}, 1, 1), RegionInaccessible);
  CHECK_THROWS_AS(WorldModel(5, 5, {}, {{"a", {0, 0}}, {"b", {0, 0}}}, 1, 1), RegionInaccessible);
}

TEST_CASE("primitives and successors") {
  WorldModel w(3, 3, {{1, 1}}, {{"a", {0, 0}}}, 1, 1);
  CHECK(w.step({0, 0}, Primitive::Stay) == Cell{0, 0});
  CHECK_THROWS_AS(w.step({0, 0}, Primitive::NE), IllegalMove);  // into the obstacle
  CHECK_THROWS_AS(w.step({0, 0}, Primitive::W), IllegalMove);   // off the grid
  auto s = w.successors({0, 0});
  CHECK(s.size() == 3);  // stay, one east, one south/north
  CHECK(std::find(s.begin(), s.end(), Cell{1, 1}) == s.end());
  auto d = w.hop_distances({0, 0});
  CHECK(d[static_cast<size_t>(w.index({2, 2}))] == 3);
  CHECK(d[static_cast<size_t>(w.index({1, 1}))] == -1);
}

TEST_CASE("region lookup") {
  WorldModel w(4, 4, {}, {{"a", {0, 0}}, {"b", {3, 3}}}, 2, 2);
  CHECK(w.find_region("b") == 1);
  CHECK_FALSE(w.find_region("c").has_value());
  CHECK(w.region_at({3, 3}) == 1);
  CHECK_FALSE(w.region_at({1, 1}).has_value());
}

TEST_CASE("teams follow the capability matrix") {
  CapabilityMatrix z(3, 2);
  z.grant(0, 1);
  z.grant(1, 1);
  z.grant(2, 2);
  z.grant(0, 2);
  Teams t = teams(z);
  CHECK(t[1] == std::vector<RobotId>{0, 1});
  CHECK(t[2] == std::vector<RobotId>{0, 2});
  z.revoke(0, 2);
  CHECK(teams(z)[2] == std::vector<RobotId>{2});
}

TEST_CASE("failure clears skills and reports the broken assignments") {
  CapabilityMatrix z(3, 3);
  for (int j = 0; j < 3; ++j)
    for (int c = 1; c <= 3; ++c) z.grant(j, c);
  std::vector<AssignedTask> tasks = {{0, 0, 2}, {1, 1, 3}, {2, 2, 2}};
  FailureOutcome one = apply_failure(z, {5, {{1, 3}}}, tasks);
  CHECK(one.failed == std::vector<int>{1});
  CHECK_FALSE(one.z.has(1, 3));
  CHECK(one.z.has(1, 2));

  FailureOutcome all = apply_failure(z, {5, {{0, kIdle}, {2, 2}}}, tasks);
  CHECK(all.failed == std::vector<int>{0, 2});
  CHECK(all.z.skills_of(0).empty());

  CHECK(apply_failure(z, {0, {}}, tasks).z == z);
  CHECK_THROWS_AS(apply_failure(z, {0, {{7, 1}}}, tasks), ScenarioError);
}
