#include "mvplan/scenario.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mvplan/errors.hpp"
#include "mvplan/planner.hpp"

namespace mvplan {

using nlohmann::json;

namespace {

Cell read_cell(const json& v) {
  if (!v.is_array() || v.size() != 2) throw ScenarioError("cell must be [x, y]");
  return {v[0].get<int>(), v[1].get<int>()};
}

SkillId resolve_skill(const json& v, const std::vector<std::string>& names) {
  if (v.is_number_integer()) {
    int s = v.get<int>();
    if (s < 1 || s >= static_cast<int>(names.size())) throw ScenarioError("skill index out of range");
    return s;
  }
  std::string name = v.get<std::string>();
  for (size_t i = 1; i < names.size(); ++i)
    if (names[i] == name) return static_cast<SkillId>(i);
  throw ScenarioError("unknown skill '" + name + "'");
}

RobotId resolve_robot(const json& v, int robots) {
  int r = v.get<int>();
  if (r < 1 || r > robots) throw ScenarioError("robot id " + std::to_string(r) + " out of range");
  return r - 1;
}

}  // namespace

Scenario load_scenario(const json& doc) {
  Scenario sc;
  sc.name = doc.value("name", "scenario");
  const json& w = doc.at("world");

  sc.skill_names = {"idle"};
  for (const json& s : w.at("skills")) sc.skill_names.push_back(s.get<std::string>());
  const int skills = static_cast<int>(sc.skill_names.size()) - 1;
  if (skills < 1) throw ScenarioError("at least one skill required");
  SkillId mobility = w.contains("mobility_skill") ? resolve_skill(w.at("mobility_skill"), sc.skill_names) : 1;

  std::vector<Cell> obstacles;
  for (const json& o : w.value("obstacles", json::array())) obstacles.push_back(read_cell(o));
  std::vector<Region> regions;
  for (const json& r : w.at("regions")) regions.push_back({r.at("name").get<std::string>(), read_cell(r.at("cell"))});

  const json& robots = doc.at("robots");
  const int n = static_cast<int>(robots.size());
  if (n < 1) throw ScenarioError("at least one robot required");
  sc.world = WorldModel(w.at("width").get<int>(), w.at("height").get<int>(), obstacles, regions, n, skills, mobility);
  sc.capabilities = CapabilityMatrix(n, skills);
  for (int j = 0; j < n; ++j) {
    const json& r = robots[static_cast<size_t>(j)];
    Cell c = read_cell(r.at("start"));
    if (!sc.world.is_free(c)) throw PositionOutOfBounds("robot " + std::to_string(j + 1) + " starts outside free space");
    sc.start.push_back(c);
    for (const json& s : r.at("skills")) sc.capabilities.grant(j, resolve_skill(s, sc.skill_names));
  }
  Teams team = teams(sc.capabilities);

  auto region_id = [&](const json& v) {
    auto r = sc.world.find_region(v.get<std::string>());
    if (!r) throw ScenarioError("unknown region '" + v.get<std::string>() + "'");
    return *r;
  };

  sc.preds = PredicateTable(mobility);
  std::vector<double> penalties;
  const json& preds = doc.at("predicates");
  for (const json& p : preds.value("apply", json::array())) {
    ApplyPredicate a;
    a.name = p.at("name").get<std::string>();
    a.skill = resolve_skill(p.at("skill"), sc.skill_names);
    a.region = region_id(p.at("region"));
    a.robot = resolve_robot(p.at("robot"), n);
    sc.preds.add_apply(a);
    penalties.push_back(p.at("penalty").get<double>());
  }
  for (const json& p : preds.value("avoid", json::array())) {
    AvoidPredicate a;
    a.name = p.at("name").get<std::string>();
    a.scope_skill = resolve_skill(p.at("scope_skill"), sc.skill_names);
    a.skill = resolve_skill(p.at("skill"), sc.skill_names);
    a.region = region_id(p.at("region"));
    const json& subj = p.at("subject");
    if (subj.is_string() && subj.get<std::string>() == "all") {
      a.subject = kAllRobots;
      a.subjects = team[static_cast<size_t>(a.scope_skill)];
    } else {
      a.subject = resolve_robot(subj, n);
      a.subjects = {a.subject};
    }
    sc.preds.add_avoid(a);
  }
  sc.penalties = PenaltyMap(penalties);
  sc.nba = load_nba(doc.at("automaton"), sc.preds);

  for (const json& f : doc.value("failures", json::array())) {
    FailureEvent ev;
    ev.time = f.at("time").get<int>();
    if (ev.time < 0) throw ScenarioError("failure time must be non-negative");
    for (const json& l : f.at("losses")) {
      SkillLoss loss;
      loss.robot = resolve_robot(l.at("robot"), n);
      const json& s = l.at("skill");
      loss.skill = (s.is_string() && s.get<std::string>() == "all") ? kIdle : resolve_skill(s, sc.skill_names);
      ev.losses.push_back(loss);
    }
    sc.failures.push_back(std::move(ev));
  }
  std::stable_sort(sc.failures.begin(), sc.failures.end(),
                   [](const FailureEvent& a, const FailureEvent& b) { return a.time < b.time; });
  if (doc.contains("options")) sc.suffix_cycles = doc["options"].value("suffix_cycles", 2);
  if (sc.suffix_cycles < 1) throw ScenarioError("suffix_cycles must be at least 1");
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ScenarioError(path + ": " + e.what());
  }
  try {
    return load_scenario(doc);
  } catch (const json::exception& e) {
    throw ScenarioError(path + ": " + e.what());
  }
}

std::vector<Diagnostic> validate(const Scenario& sc) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string check, std::string msg) {
    out.push_back({Diagnostic::Level::Error, std::move(check), std::move(msg)});
  };
  for (const auto& [e, g] : sc.nba.transitions()) {
    std::string where = sc.nba.state(e.from).name + "->" + sc.nba.state(e.to).name;
    for (const Conjunct& c : g.disjuncts) {
      if (conjunct_overloads_robot(c))
        error("robot-overload", where + ": a conjunct assigns two predicates to one robot");
      for (const Literal& l : c) {
        if (l.kind != LiteralKind::PositiveApply) continue;
        const ApplyPredicate& p = sc.preds.apply(l.pred);
        if (l.robot < 0) error("holder-capability", where + ": " + p.name + " has no robot");
        else if (!sc.capabilities.has(l.robot, p.skill))
          error("holder-capability", where + ": robot " + std::to_string(l.robot + 1) + " lacks the skill for " + p.name);
      }
    }
  }
  for (const SelfLoopIssue& i : loose_self_loops(sc.nba))
    out.push_back({Diagnostic::Level::Warning, "waiting-loop", i.reason + "; replanning optimality not guaranteed"});
  for (const FailureEvent& ev : sc.failures)
    for (const SkillLoss& l : ev.losses)
      if (l.skill != kIdle && !sc.capabilities.has(l.robot, l.skill))
        out.push_back({Diagnostic::Level::Warning, "failure-schedule",
                       "robot " + std::to_string(l.robot + 1) + " never had skill " + sc.skill_names[static_cast<size_t>(l.skill)]});

  bool clean = std::none_of(out.begin(), out.end(), [](const Diagnostic& d) { return d.level == Diagnostic::Level::Error; });
  if (clean) {
    Nba pruned = prune(sc.nba);
    PlanContext ctx{pruned, sc.preds, sc.penalties, sc.world, sc.capabilities};
    try {
      HybridPlan plan = synthesize(ctx, sc.start);
      if (!plan.violation.is_zero()) {
        std::ostringstream os;
        os << "offline plan has violation " << plan.violation;
        error("offline-feasible", os.str());
      }
    } catch (const Infeasible& e) {
      error("offline-feasible", e.what());
    }
  }
  return out;
}

std::vector<SkillLoss> parse_losses(const std::string& text, const Scenario& sc) {
  std::vector<SkillLoss> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw ScenarioError("failure '" + item + "' must be robot:skill");
    SkillLoss l;
    l.robot = resolve_robot(json(std::stoi(item.substr(0, colon))), sc.world.robot_count());
    std::string skill = item.substr(colon + 1);
    if (skill == "all") {
      l.skill = kIdle;
    } else if (!skill.empty() && std::all_of(skill.begin(), skill.end(), ::isdigit)) {
      l.skill = resolve_skill(json(std::stoi(skill)), sc.skill_names);
    } else {
      l.skill = resolve_skill(json(skill), sc.skill_names);
    }
    out.push_back(l);
  }
  return out;
}

}  // namespace mvplan
