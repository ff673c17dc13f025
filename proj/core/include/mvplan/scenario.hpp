#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mvplan/automaton.hpp"
#include "mvplan/formula.hpp"
#include "mvplan/world.hpp"

namespace mvplan {

struct Scenario {
  std::string name;
  WorldModel world;
  std::vector<Cell> start;
  std::vector<std::string> skill_names;  // index 0 unused
  CapabilityMatrix capabilities;
  PredicateTable preds;
  PenaltyMap penalties;
  Nba nba;  // literals already carry the initial assignment
  std::vector<FailureEvent> failures;
  int suffix_cycles = 2;
};

// Robots in files are 1-based; skills are names or 1-based indices.
Scenario load_scenario(const nlohmann::json& doc);
Scenario load_scenario_file(const std::string& path);

struct Diagnostic {
  enum class Level { Error, Warning } level = Level::Error;
  std::string check;
  std::string message;
};

// Structural checks (one task per robot per conjunct, capable holders,
// waiting loops) plus an offline zero-violation synthesis.
std::vector<Diagnostic> validate(const Scenario& sc);

// "2:3,4:all" style failure list -> losses (robot 1-based, skill index/name).
std::vector<SkillLoss> parse_losses(const std::string& text, const Scenario& sc);

}  // namespace mvplan
