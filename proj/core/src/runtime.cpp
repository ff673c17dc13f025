#include "mvplan/runtime.hpp"

#include <map>

#include "mvplan/errors.hpp"

namespace mvplan {

using nlohmann::ordered_json;

ordered_json cost_json(Cost c) {
  if (c.is_infinite()) return "inf";
  double v = c.value();
  if (v == static_cast<double>(static_cast<long long>(v))) return static_cast<long long>(v);
  return v;
}

namespace {

ordered_json cell_json(Cell c) { return ordered_json::array({c.x, c.y}); }

ordered_json positions_json(const HybridState& h) {
  ordered_json a = ordered_json::array();
  for (Cell c : h.positions) a.push_back(cell_json(c));
  return a;
}

ordered_json skills_json(const HybridState& h, const Scenario& sc) {
  ordered_json a = ordered_json::array();
  for (SkillId s : h.skills) a.push_back(sc.skill_names[static_cast<size_t>(s)]);
  return a;
}

ordered_json symbol_json(const HybridState& h, const Scenario& sc) {
  ordered_json a = ordered_json::array();
  for (size_t j = 0; j < h.skills.size(); ++j) {
    if (h.skills[j] == kIdle) continue;
    auto r = sc.world.region_at(h.positions[j]);
    if (!r) continue;
    a.push_back("r" + std::to_string(j + 1) + ":" + sc.skill_names[static_cast<size_t>(h.skills[j])] + "@" +
                sc.world.region(*r).name);
  }
  return a;
}

ordered_json edge_json(const Nba& nba, Edge e) {
  return ordered_json::array({nba.state(e.from).name, nba.state(e.to).name});
}

}  // namespace

std::vector<ordered_json> trace_records(const HybridPlan& plan, const Scenario& sc, const Nba& nba) {
  std::vector<ordered_json> out;
  for (size_t k = 0; k < plan.length(); ++k) {
    const HybridState& h = plan.at(k);
    ordered_json r;
    r["step"] = k;
    r["part"] = k < plan.prefix.size() ? "prefix" : "suffix";
    r["nba_state"] = nba.state(h.q).name;
    r["positions"] = positions_json(h);
    r["skills"] = skills_json(h, sc);
    out.push_back(std::move(r));
  }
  return out;
}

std::string to_jsonl(const std::vector<ordered_json>& records) {
  std::string s;
  for (const ordered_json& r : records) {
    s += r.dump();
    s += '\n';
  }
  return s;
}

RunResult run(const Scenario& sc, const RunOptions& opt) {
  RunResult res;
  const int cycles = opt.suffix_cycles > 0 ? opt.suffix_cycles : sc.suffix_cycles;
  res.nba = prune(sc.nba);
  res.z = sc.capabilities;
  PlanContext ctx{res.nba, sc.preds, sc.penalties, sc.world, res.z};

  try {
    res.plan = synthesize(ctx, sc.start);
  } catch (const Infeasible& e) {
    throw InfeasibleMission(e.what());
  }
  {
    ordered_json ev;
    ev["t"] = 0;
    ev["event"] = "PlanSynthesized";
    ev["violation"] = cost_json(res.plan.violation);
    ev["prefix_length"] = res.plan.prefix.size();
    ev["suffix_length"] = res.plan.suffix.size();
    res.events.push_back(std::move(ev));
  }
  res.violation = res.plan.violation;

  // Failures at the same step form one batch.
  std::map<int, FailureEvent> schedule;
  auto merge = [&](const FailureEvent& f) {
    FailureEvent& slot = schedule[f.time];
    slot.time = f.time;
    slot.losses.insert(slot.losses.end(), f.losses.begin(), f.losses.end());
  };
  if (opt.use_schedule)
    for (const FailureEvent& f : sc.failures) merge(f);
  for (const FailureEvent& f : opt.extra_failures) merge(f);

  size_t k = 0;
  long remaining = static_cast<long>(res.plan.prefix.size() + static_cast<size_t>(cycles) * res.plan.suffix.size());
  for (int t = 0; remaining > 0; ++t, --remaining) {
    auto due = schedule.find(t);
    if (due != schedule.end()) {
      const StateId q_cur = res.plan.at(k).q;
      std::vector<AssignedTask> tasks = assigned_tasks(res.nba, sc.preds, q_cur);
      FailureOutcome fo = apply_failure(res.z, due->second, tasks);
      res.z = fo.z;
      std::vector<PredId> broken = broken_predicates(res.nba, q_cur, sc.preds, res.z);
      ordered_json ev;
      ev["t"] = t;
      ev["event"] = "FailureInjected";
      ordered_json losses = ordered_json::array();
      for (const SkillLoss& l : due->second.losses)
        losses.push_back({{"robot", l.robot + 1}, {"skill", l.skill == kIdle ? std::string("all") : sc.skill_names[static_cast<size_t>(l.skill)]}});
      ev["losses"] = losses;
      ordered_json failed = ordered_json::array();
      for (PredId p : broken) failed.push_back(sc.preds.apply(p).name);
      ev["failed"] = failed;
      ev["nba_state"] = res.nba.state(q_cur).name;
      res.events.push_back(std::move(ev));

      if (!broken.empty()) {
        RepairResult rep = repair(res.nba, q_cur, broken, sc.preds, res.z, sc.penalties);
        ordered_json er;
        er["t"] = t;
        er["event"] = "EdgesRepaired";
        er["count"] = rep.edges.size();
        ordered_json edges = ordered_json::array();
        for (const Edge& e : rep.edges) edges.push_back(edge_json(res.nba, e));
        er["edges"] = edges;
        res.events.push_back(std::move(er));
        for (const ReassignmentRecord& r : rep.log) {
          ordered_json ra;
          ra["t"] = t;
          ra["event"] = "Reassigned";
          ra["predicate"] = sc.preds.apply(r.predicate).name;
          ra["edge"] = edge_json(res.nba, r.edge);
          ra["disjunct"] = r.disjunct;
          ordered_json path = ordered_json::array();
          for (RobotId j : r.path) path.push_back(j + 1);
          ra["path"] = path;
          ra["sacrificed"] = r.sacrificed >= 0 ? ordered_json(sc.preds.apply(r.sacrificed).name) : ordered_json(nullptr);
          ra["cost"] = cost_json(r.cost);
          res.events.push_back(std::move(ra));
        }
        res.nba = std::move(rep.nba);

        HybridPlan current = rebase(res.plan, k);
        ReplanResult rr;
        try {
          rr = replan(current, ctx);
        } catch (const Infeasible& e) {
          throw InfeasibleMission(e.what());
        }
        ordered_json rp;
        rp["t"] = t;
        rp["event"] = "Replanned";
        rp["mode"] = to_string(rr.mode);
        rp["violation"] = cost_json(rr.plan.violation);
        ordered_json cheapest = ordered_json::array();
        for (StateId q : rr.cheapest.path) cheapest.push_back(res.nba.state(q).name);
        rp["cheapest_path"] = cheapest;
        rp["cheapest_cost"] = cost_json(rr.cheapest.cost);
        rp["overlap"] = rr.overlap;
        rp["true_overlap"] = rr.true_overlap;
        ordered_json reused = ordered_json::array();
        for (const auto& [a, b] : rr.reused) reused.push_back(ordered_json::array({a, b}));
        rp["reused"] = reused;
        res.events.push_back(std::move(rp));
        res.modes.push_back(rr.mode);
        res.plan = std::move(rr.plan);
        res.violation = res.plan.violation;
        k = 0;
        remaining = static_cast<long>(res.plan.prefix.size() + static_cast<size_t>(cycles) * res.plan.suffix.size());
      }
    }

    const HybridState& h = res.plan.at(k);
    StateId next = res.plan.next_q(k);
    ordered_json st;
    st["t"] = t;
    st["event"] = "StepExecuted";
    st["from"] = res.nba.state(h.q).name;
    st["to"] = res.nba.state(next).name;
    st["positions"] = positions_json(h);
    st["skills"] = skills_json(h, sc);
    st["symbol"] = symbol_json(h, sc);
    res.events.push_back(std::move(st));
    res.executed.push_back(h);
    if (++k == res.plan.length()) k = res.plan.prefix.size();
  }

  ordered_json mv;
  mv["t"] = res.events.empty() ? 0 : res.events.back()["t"].get<int>();
  mv["event"] = "MissionViolation";
  mv["violation"] = cost_json(res.violation);
  res.events.push_back(std::move(mv));
  return res;
}

}  // namespace mvplan
