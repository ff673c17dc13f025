#include "fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <queue>
#include <random>
#include <set>

#include "mvplan/errors.hpp"


namespace fixtures {

using namespace mvplan;
using nlohmann::json;

namespace {

struct Rng {
  std::mt19937 gen;
  explicit Rng(uint32_t seed) : gen(seed) {}
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
  bool chance(double p) { return std::bernoulli_distribution(p)(gen); }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[static_cast<size_t>(uniform(0, static_cast<int>(v.size()) - 1))]; }
  template <class T>
  void shuffle(std::vector<T>& v) { std::shuffle(v.begin(), v.end(), gen); }
};

}  // namespace

std::string scenario_path(const std::string& file) { return std::string(MVPLAN_SCENARIO_DIR) + "/" + file; }

Scenario load(const std::string& file) { return load_scenario_file(scenario_path(file)); }

Scenario load_data(const std::string& file) {
  return load_scenario_file(std::string(MVPLAN_TEST_DATA_DIR) + "/" + file);
}

GuardCase three_predicate_guard(std::vector<double> penalties, bool first_holds) {
  GuardCase g;
  g.world = WorldModel(3, 1, {}, {{"a", {0, 0}}, {"b", {1, 0}}, {"c", {2, 0}}}, 3, 2);
  g.z = CapabilityMatrix(3, 2);
  for (int j = 0; j < 3; ++j) {
    g.z.grant(j, 1);
    g.z.grant(j, 2);
  }
  g.preds = PredicateTable(1);
  for (int i = 0; i < 3; ++i) g.preds.add_apply({"pi" + std::to_string(i + 1), 2, i, i});
  g.f = PenaltyMap(std::move(penalties));
  std::vector<SkillId> skills = {first_holds ? 2 : 0, 0, 0};
  g.symbol = label({{0, 0}, {1, 0}, {2, 0}}, skills, g.world, g.z);
  Literal p1{LiteralKind::PositiveApply, 0, 0}, p2{LiteralKind::PositiveApply, 1, 1}, p3{LiteralKind::PositiveApply, 2, 2};
  g.guard.disjuncts = {{p1, p2}, {p3}};
  return g;
}

GuardCase random_guard(uint32_t seed, int max_preds) {
  Rng rng(seed);
  GuardCase g;
  const int robots = 4;
  // Cells 0..3 are regions, cell 4 is open floor.
  g.world = WorldModel(5, 1, {}, {{"a", {0, 0}}, {"b", {1, 0}}, {"c", {2, 0}}, {"d", {3, 0}}}, robots, 3);
  g.z = CapabilityMatrix(robots, 3);
  for (int j = 0; j < robots; ++j)
    for (int c = 1; c <= 3; ++c) g.z.grant(j, c);
  g.preds = PredicateTable(1);
  const int n = rng.uniform(1, max_preds);
  std::vector<double> pen;
  for (int i = 0; i < n; ++i) {
    g.preds.add_apply({"pi" + std::to_string(i), rng.uniform(2, 3), rng.uniform(0, robots - 1), rng.uniform(0, 3)});
    pen.push_back(static_cast<double>(rng.uniform(1, 30)));
  }
  g.f = PenaltyMap(pen);
  const int avoids = rng.uniform(0, 1);
  for (int i = 0; i < avoids; ++i) {
    AvoidPredicate a;
    a.name = "av" + std::to_string(i);
    a.scope_skill = 1;
    a.skill = rng.chance(0.5) ? 1 : rng.uniform(2, 3);
    a.region = rng.uniform(0, 3);
    if (rng.chance(0.3)) {
      a.subject = kAllRobots;
      a.subjects = {0, 1, 2, 3};
    } else {
      a.subject = rng.uniform(0, robots - 1);
      a.subjects = {a.subject};
    }
    g.preds.add_avoid(a);
  }
  const int disjuncts = rng.uniform(1, 3);
  for (int d = 0; d < disjuncts; ++d) {
    Conjunct c;
    const int lits = rng.uniform(1, 4);
    for (int l = 0; l < lits; ++l) {
      if (avoids > 0 && rng.chance(0.12)) {
        c.push_back({LiteralKind::Avoid, rng.uniform(0, avoids - 1), kUnassigned});
        continue;
      }
      PredId p = rng.uniform(0, n - 1);
      if (rng.chance(0.15)) {
        c.push_back({LiteralKind::NegatedApply, p, g.preds.apply(p).robot});
      } else {
        c.push_back({LiteralKind::PositiveApply, p, rng.chance(0.15) ? kUnassigned : g.preds.apply(p).robot});
      }
    }
    normalize(c);
    g.guard.disjuncts.push_back(std::move(c));
  }
  std::vector<Cell> pos;
  std::vector<SkillId> skills;
  for (int j = 0; j < robots; ++j) {
    pos.push_back({rng.uniform(0, 4), 0});
    skills.push_back(rng.chance(0.5) ? rng.uniform(1, 3) : kIdle);
  }
  g.symbol = label(pos, skills, g.world, g.z);
  return g;
}

ReallocCase random_realloc(uint32_t seed) {
  Rng rng(seed);
  ReallocCase r;
  r.robots = rng.uniform(2, 6);
  const int skills = 4;  // move + three work skills
  CapabilityMatrix z(r.robots, skills);
  for (int j = 0; j < r.robots; ++j) {
    z.grant(j, 1);
    bool any = false;
    for (int c = 2; c <= skills; ++c)
      if (rng.chance(0.55)) {
        z.grant(j, c);
        any = true;
      }
    if (!any) z.grant(j, rng.uniform(2, skills));
  }
  r.preds = PredicateTable(1);
  std::vector<double> pen;
  const std::vector<double> menu = {5, 10, 15, 20, 30, 50};

  std::vector<RobotId> order(static_cast<size_t>(r.robots));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  const int positives = rng.uniform(1, std::min(6, r.robots));
  for (int i = 0; i < positives; ++i) {
    RobotId j = order[static_cast<size_t>(i)];
    std::vector<SkillId> own;
    for (SkillId c = 2; c <= skills; ++c)
      if (z.has(j, c)) own.push_back(c);
    PredId p = r.preds.add_apply({"pi" + std::to_string(i), rng.pick(own), j, rng.uniform(0, 3)});
    pen.push_back(rng.pick(menu));
    r.conjunct.push_back({LiteralKind::PositiveApply, p, j});
  }
  // The conjunct must be satisfiable before the failure: no restriction may
  // hit a task's current holder.
  auto clashes = [&](RobotId j, SkillId skill, RegionId region) {
    for (const Literal& l : r.conjunct) {
      if (l.kind != LiteralKind::PositiveApply || l.robot != j) continue;
      const ApplyPredicate& p = r.preds.apply(l.pred);
      if (p.region == region && (skill == 1 || skill == p.skill)) return true;
    }
    return false;
  };
  if (rng.chance(0.4)) {
    RobotId j = rng.uniform(0, r.robots - 1);
    SkillId c = rng.uniform(2, skills);
    RegionId g = rng.uniform(0, 3);
    if (!clashes(j, c, g)) {
      PredId p = r.preds.add_apply({"neg", c, j, g});
      pen.push_back(rng.pick(menu));
      r.conjunct.push_back({LiteralKind::NegatedApply, p, j});
    }
  }
  Teams team = teams(z);
  const int avoids = rng.uniform(0, 2);
  for (int i = 0; i < avoids; ++i) {
    AvoidPredicate a;
    a.name = "av" + std::to_string(i);
    a.scope_skill = rng.uniform(1, skills);
    a.skill = rng.chance(0.5) ? 1 : rng.uniform(2, skills);
    a.region = rng.uniform(0, 3);
    if (rng.chance(0.4)) {
      a.subject = kAllRobots;
      a.subjects = team[static_cast<size_t>(a.scope_skill)];
    } else {
      a.subject = rng.uniform(0, r.robots - 1);
      a.subjects = {a.subject};
    }
    if (std::any_of(a.subjects.begin(), a.subjects.end(), [&](RobotId j) { return clashes(j, a.skill, a.region); }))
      continue;
    PredId id = r.preds.add_avoid(a);
    r.conjunct.push_back({LiteralKind::Avoid, id, kUnassigned});
  }
  r.f = PenaltyMap(pen);
  normalize(r.conjunct);

  PredId failed = rng.uniform(0, positives - 1);
  r.failed = failed;
  r.robot = r.preds.apply(failed).robot;
  z.revoke(r.robot, r.preds.apply(failed).skill);
  if (rng.chance(0.2))
    for (SkillId c = 2; c <= skills; ++c) z.revoke(r.robot, c);
  r.z = z;
  return r;
}

ReallocCase chain_realloc(int tasks) {
  ReallocCase r;
  r.robots = tasks + 1;
  const int skills = 5;  // move, three cycling work skills, and a last one
  auto skill_of = [&](int j) -> SkillId { return j == tasks - 1 ? 5 : 2 + j % 3; };
  r.z = CapabilityMatrix(r.robots, skills);
  r.preds = PredicateTable(1);
  std::vector<double> pen;
  for (int j = 0; j < tasks; ++j) {
    r.z.grant(j, 1);
    r.z.grant(j, skill_of(j));
    if (j > 0) r.z.grant(j, skill_of(j - 1));
    PredId p = r.preds.add_apply({"t" + std::to_string(j), skill_of(j), j, j});
    pen.push_back(10);
    r.conjunct.push_back({LiteralKind::PositiveApply, p, j});
  }
  r.z.grant(tasks, 1);
  r.z.grant(tasks, 5);
  r.f = PenaltyMap(pen);
  r.failed = 0;
  r.robot = 0;
  r.z.revoke(0, skill_of(0));
  return r;
}

json random_mission(uint32_t seed) {
  Rng rng(seed);
  const int w = rng.uniform(3, 6), h = rng.uniform(3, 6);
  const int robots = rng.uniform(2, 3);
  std::vector<Cell> cells;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) cells.push_back({x, y});
  rng.shuffle(cells);
  size_t next = 0;
  auto take = [&] { return cells[next++]; };

  const int regions = rng.uniform(2, 4);
  json doc;
  doc["name"] = "random-" + std::to_string(seed);
  json world;
  world["width"] = w;
  world["height"] = h;
  world["skills"] = {"move", "a", "b"};
  world["mobility_skill"] = "move";
  json regs = json::array();
  for (int r = 0; r < regions; ++r) {
    Cell c = take();
    regs.push_back({{"name", "l" + std::to_string(r)}, {"cell", {c.x, c.y}}});
  }
  world["regions"] = regs;
  json rob = json::array();
  std::vector<std::vector<std::string>> own(static_cast<size_t>(robots));
  for (int j = 0; j < robots; ++j) {
    Cell c = take();
    own[static_cast<size_t>(j)] = rng.chance(0.5) ? std::vector<std::string>{"a", "b"}
                                                  : std::vector<std::string>{rng.chance(0.5) ? "a" : "b"};
    json sk = {"move"};
    for (const auto& s : own[static_cast<size_t>(j)]) sk.push_back(s);
    rob.push_back({{"start", {c.x, c.y}}, {"skills", sk}});
  }
  json obstacles = json::array();
  const int walls = rng.uniform(0, 2);
  for (int i = 0; i < walls; ++i) {
    Cell c = take();
    obstacles.push_back({c.x, c.y});
  }
  world["obstacles"] = obstacles;
  doc["world"] = world;
  doc["robots"] = rob;

  const int preds = rng.uniform(2, 5);
  const std::vector<int> menu = {5, 10, 20, 40};
  json apply = json::array();
  std::vector<int> owner;
  for (int i = 0; i < preds; ++i) {
    int j = rng.uniform(0, robots - 1);
    owner.push_back(j);
    apply.push_back({{"name", "p" + std::to_string(i)},
                     {"skill", rng.pick(own[static_cast<size_t>(j)])},
                     {"region", "l" + std::to_string(rng.uniform(0, regions - 1))},
                     {"robot", j + 1},
                     {"penalty", rng.pick(menu)}});
  }
  json avoid = json::array();
  const bool has_avoid = rng.chance(0.5);
  if (has_avoid) {
    int j = rng.uniform(0, robots - 1);
    avoid.push_back({{"name", "keep"}, {"scope_skill", "move"}, {"subject", j + 1}, {"skill", "move"},
                     {"region", "l" + std::to_string(rng.uniform(0, regions - 1))}});
  }
  doc["predicates"] = {{"apply", apply}, {"avoid", avoid}};

  auto task = [&]() {
    json conj = json::array();
    std::set<int> used;
    const int k = rng.uniform(1, 2);
    for (int i = 0; i < k; ++i) {
      int p = rng.uniform(0, preds - 1);
      if (!used.insert(owner[static_cast<size_t>(p)]).second) continue;
      conj.push_back("pi:p" + std::to_string(p));
    }
    if (has_avoid && rng.chance(0.5)) conj.push_back("npi:keep");
    return conj;
  };
  auto guard = [&]() {
    json dnf = json::array();
    dnf.push_back(task());
    if (rng.chance(0.3)) dnf.push_back(task());
    return dnf;
  };
  auto loop = [&]() -> json {
    if (has_avoid && rng.chance(0.5)) return json::array({json::array({"npi:keep"})});
    return "true";
  };

  const int chain = rng.uniform(2, 4);
  const bool cycle = rng.chance(0.5);
  json states = json::array(), trans = json::array();
  for (int i = 0; i <= chain; ++i)
    states.push_back({{"name", "q" + std::to_string(i)}, {"initial", i == 0}, {"accepting", i == chain}});
  for (int i = 0; i < chain; ++i) {
    trans.push_back({{"from", "q" + std::to_string(i)}, {"to", "q" + std::to_string(i)}, {"dnf", loop()}});
    trans.push_back({{"from", "q" + std::to_string(i)}, {"to", "q" + std::to_string(i + 1)}, {"dnf", guard()}});
  }
  const std::string acc = "q" + std::to_string(chain);
  trans.push_back({{"from", acc}, {"to", acc}, {"dnf", loop()}});
  if (cycle) {
    states.push_back({{"name", "r"}, {"initial", false}, {"accepting", false}});
    trans.push_back({{"from", acc}, {"to", "r"}, {"dnf", guard()}});
    trans.push_back({{"from", "r"}, {"to", "r"}, {"dnf", loop()}});
    trans.push_back({{"from", "r"}, {"to", acc}, {"dnf", guard()}});
  }
  doc["automaton"] = {{"states", states}, {"transitions", trans}};

  int victim = rng.uniform(0, preds - 1);
  json lost = {{"robot", owner[static_cast<size_t>(victim)] + 1}, {"skill", apply[static_cast<size_t>(victim)]["skill"]}};
  doc["failures"] = json::array({{{"time", rng.uniform(0, 4)}, {"losses", json::array({lost})}}});
  return doc;
}

std::optional<ReplanCase> replan_case(uint32_t seed) {
  ReplanCase rc;
  rc.seed = seed;
  try {
    rc.sc = load_scenario(random_mission(seed));
    for (const Diagnostic& d : validate(rc.sc))
      if (d.level == Diagnostic::Level::Error) return std::nullopt;
    Nba nba = prune(rc.sc.nba);
    PlanContext ctx{nba, rc.sc.preds, rc.sc.penalties, rc.sc.world, rc.sc.capabilities};
    HybridPlan plan = synthesize(ctx, rc.sc.start);
    const FailureEvent& ev = rc.sc.failures.front();
    size_t k = static_cast<size_t>(ev.time);
    if (k >= plan.length()) k = plan.prefix.size() + (k - plan.prefix.size()) % plan.suffix.size();
    rc.q_cur = plan.at(k).q;
    FailureOutcome fo = apply_failure(rc.sc.capabilities, ev, assigned_tasks(nba, rc.sc.preds, rc.q_cur));
    std::vector<PredId> broken = broken_predicates(nba, rc.q_cur, rc.sc.preds, fo.z);
    if (broken.empty()) return std::nullopt;
    RepairResult rep = repair(nba, rc.q_cur, broken, rc.sc.preds, fo.z, rc.sc.penalties);
    rc.nba = rep.nba;
    rc.z = fo.z;
    rc.current = rebase(plan, k);
    PlanContext after{rc.nba, rc.sc.preds, rc.sc.penalties, rc.sc.world, rc.z};
    rc.result = replan(rc.current, after);
  } catch (const Error&) {
    return std::nullopt;
  }
  return rc;
}

std::vector<ReplanCase> local_cases(int count, uint32_t first, uint32_t limit) {
  std::vector<ReplanCase> out;
  for (uint32_t s = first; s < limit && static_cast<int>(out.size()) < count; ++s) {
    auto rc = replan_case(s);
    if (rc && rc->result.mode == ReplanMode::Local) out.push_back(std::move(*rc));
  }
  return out;
}

std::vector<HybridState> unroll(const HybridPlan& plan, size_t steps) {
  std::vector<HybridState> out;
  size_t k = 0;
  for (size_t i = 0; i < steps; ++i) {
    out.push_back(plan.at(k));
    if (++k == plan.length()) k = plan.prefix.size();
  }
  return out;
}

bool accepts_lasso(const Nba& nba, StateId start, const std::vector<Symbol>& prefix, const std::vector<Symbol>& cycle,
                   const PredicateTable& preds) {
  auto step = [&](const std::set<StateId>& from, const Symbol& s) {
    std::set<StateId> to;
    for (const auto& [e, g] : nba.transitions())
      if (from.count(e.from) && satisfies(s, g, preds)) to.insert(e.to);
    return to;
  };
  std::set<StateId> cur = {start};
  for (const Symbol& s : prefix) cur = step(cur, s);
  if (cur.empty() || cycle.empty()) return false;

  // Nodes (q, i): in state q about to read cycle[i].
  const size_t K = cycle.size();
  const int Q = nba.size();
  auto id = [&](StateId q, size_t i) { return static_cast<size_t>(q) * K + i; };
  std::vector<std::vector<size_t>> adj(static_cast<size_t>(Q) * K);
  for (const auto& [e, g] : nba.transitions())
    for (size_t i = 0; i < K; ++i)
      if (satisfies(cycle[i], g, preds)) adj[id(e.from, i)].push_back(id(e.to, (i + 1) % K));
  auto reach = [&](std::vector<size_t> seeds) {
    std::vector<char> seen(adj.size(), 0);
    std::queue<size_t> q;
    for (size_t s : seeds) q.push(s);
    while (!q.empty()) {
      size_t u = q.front();
      q.pop();
      for (size_t v : adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          q.push(v);
        }
    }
    return seen;
  };
  std::vector<size_t> seeds;
  for (StateId q : cur) seeds.push_back(id(q, 0));
  std::vector<char> live = reach(seeds);
  for (StateId q : cur) live[id(q, 0)] = 1;
  for (StateId q = 0; q < Q; ++q) {
    if (!nba.is_accepting(q)) continue;
    for (size_t i = 0; i < K; ++i)
      if (live[id(q, i)] && reach({id(q, i)})[id(q, i)]) return true;
  }
  return false;
}

}  // namespace fixtures
