#pragma once

// Shared fixtures and seeded instance generators for unit, property and
// acceptance tests.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mvplan/automaton.hpp"
#include "mvplan/formula.hpp"
#include "mvplan/planner.hpp"
#include "mvplan/reallocation.hpp"
#include "mvplan/replanner.hpp"
#include "mvplan/scenario.hpp"
#include "mvplan/world.hpp"

namespace fixtures {

std::string scenario_path(const std::string& file);
mvplan::Scenario load(const std::string& file);
mvplan::Scenario load_data(const std::string& file);  // tests/data

// Three predicates with penalties 10, 20, 50 on a 1-robot-each world; the
// symbol holds only the first.
struct GuardCase {
  mvplan::WorldModel world;
  mvplan::CapabilityMatrix z;
  mvplan::PredicateTable preds;
  mvplan::PenaltyMap f;
  mvplan::Symbol symbol;
  mvplan::GuardDNF guard;
};
GuardCase three_predicate_guard(std::vector<double> penalties, bool first_holds);

// Random symbol and guard over at most `max_preds` apply predicates plus the
// occasional avoid.
GuardCase random_guard(uint32_t seed, int max_preds = 6);

// One conjunct, one broken occurrence, post-failure capabilities.
struct ReallocCase {
  int robots = 0;
  mvplan::PredicateTable preds;
  mvplan::PenaltyMap f;
  mvplan::CapabilityMatrix z;
  mvplan::Conjunct conjunct;
  mvplan::PredId failed = 0;
  mvplan::RobotId robot = 0;
};
// <= 6 robots, <= 6 positive predicates, <= 2 avoid literals.
ReallocCase random_realloc(uint32_t seed);

// `tasks` robots each holding one task in a single conjunct, plus one idle
// robot. Robot j can also do robot j-1's skill; only the idle robot and the
// last holder share the final skill. Robot 1 loses its task's skill.
ReallocCase chain_realloc(int tasks);

// Small mission with true or avoid-only self-loops, as scenario JSON: <= 3 robots, <= 6x6 grid,
// <= 8 automaton states, one scheduled failure.
nlohmann::json random_mission(uint32_t seed);

// Everything a replanning check needs, captured at the failure step.
struct ReplanCase {
  uint32_t seed = 0;
  mvplan::Scenario sc;
  mvplan::Nba nba;  // repaired
  mvplan::CapabilityMatrix z;
  mvplan::HybridPlan current;  // rebased old plan
  mvplan::ReplanResult result;
  mvplan::StateId q_cur = 0;
};

// Runs synthesize -> fail -> repair -> replan on random_mission(seed).
// nullopt when the mission is invalid, nothing broke, or replanning threw.
std::optional<ReplanCase> replan_case(uint32_t seed);

// First `count` seeds (scanning upward from `first`) whose replan is Local.
std::vector<ReplanCase> local_cases(int count, uint32_t first = 1, uint32_t limit = 20000);

// Executes `plan` for `steps` steps from step 0, returning the visited
// hybrid states (wrapping through the suffix).
std::vector<mvplan::HybridState> unroll(const mvplan::HybridPlan& plan, size_t steps);

// Reference Büchi acceptor over a lasso word: `prefix` then `cycle` forever,
// read from `start` with unassigned-as-true.
bool accepts_lasso(const mvplan::Nba& nba, mvplan::StateId start, const std::vector<mvplan::Symbol>& prefix,
                   const std::vector<mvplan::Symbol>& cycle, const mvplan::PredicateTable& preds);

}  // namespace fixtures
