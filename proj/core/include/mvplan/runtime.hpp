#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mvplan/planner.hpp"
#include "mvplan/reallocation.hpp"
#include "mvplan/replanner.hpp"
#include "mvplan/scenario.hpp"

namespace mvplan {

struct RunOptions {
  int suffix_cycles = 0;  // 0: use the scenario's setting
  bool use_schedule = true;
  std::vector<FailureEvent> extra_failures;
};

struct RunResult {
  std::vector<nlohmann::ordered_json> events;
  Cost violation;
  HybridPlan plan;  // plan in force at the end
  Nba nba;          // automaton in force at the end
  CapabilityMatrix z;
  std::vector<ReplanMode> modes;
  std::vector<HybridState> executed;
};

// Execute, fail, repair, replan. Throws InfeasibleMission.
RunResult run(const Scenario& sc, const RunOptions& opt = {});

// One JSON object per line.
std::string to_jsonl(const std::vector<nlohmann::ordered_json>& records);

// Step records of a plan: prefix then one suffix cycle.
std::vector<nlohmann::ordered_json> trace_records(const HybridPlan& plan, const Scenario& sc, const Nba& nba);

nlohmann::ordered_json cost_json(Cost c);

}  // namespace mvplan
