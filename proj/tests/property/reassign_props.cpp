#include "doctest.h"
#include "fixtures.hpp"
#include "mvplan/errors.hpp"
#include "mvplan/oracles.hpp"

using namespace mvplan;

namespace {

struct Outcome {
  Cost cost;
  int hops = 0;
  bool none = false;
};

Outcome bfs(const fixtures::ReallocCase& r, const AssignmentContext& ctx) {
  try {
    ReassignPath p = bfs_reassign(ctx, r.preds, teams(r.z), r.f);
    return {p.cost, p.hops(), false};
  } catch (const NoCandidate&) {
    return {r.f.apply(r.failed), 0, true};
  }
}

}  // namespace

TEST_CASE("search matches exhaustive path enumeration") {
  for (uint32_t seed = 1; seed <= 400; ++seed) {
    CAPTURE(seed);
    auto r = fixtures::random_realloc(seed);
    AssignmentContext ctx = build_context(r.conjunct, r.preds, r.robots, r.failed, r.robot);
    Outcome o = bfs(r, ctx);
    auto best = oracle::brute_reassign(ctx, r.preds, teams(r.z), r.f);
    CHECK(o.cost == best.cost);
    CHECK(o.hops == best.hops);
  }
}

TEST_CASE("assignment solver never beats the search and never moves fewer tasks") {
  for (uint32_t seed = 1; seed <= 400; ++seed) {
    CAPTURE(seed);
    auto r = fixtures::random_realloc(seed);
    AssignmentContext ctx = build_context(r.conjunct, r.preds, r.robots, r.failed, r.robot);
    Outcome o = bfs(r, ctx);
    auto h = oracle::hungarian_reassign(r.conjunct, r.failed, r.robot, r.preds, r.z, r.f);
    CHECK(h.violation == o.cost);
    CHECK(h.reassigned >= o.hops);
  }
}

TEST_CASE("search cost is bounded by dropping the failed task") {
  for (uint32_t seed = 1; seed <= 400; ++seed) {
    CAPTURE(seed);
    auto r = fixtures::random_realloc(seed);
    AssignmentContext ctx = build_context(r.conjunct, r.preds, r.robots, r.failed, r.robot);
    Outcome o = bfs(r, ctx);
    CHECK(o.cost <= r.f.apply(r.failed));
    if (!o.none) {
      ReassignPath p = bfs_reassign(ctx, r.preds, teams(r.z), r.f);
      CHECK(p.robots.front() == r.robot);
      // Each hop hands a task to a robot that holds the skill and may take it.
      PredId task = r.failed;
      for (size_t i = 1; i < p.robots.size(); ++i) {
        RobotId b = p.robots[i];
        CHECK(r.z.has(b, r.preds.apply(task).skill));
        CHECK(ctx.may_take(b, task, r.preds));
        if (b == ctx.root) break;
        task = ctx.busy[static_cast<size_t>(b)];
        if (task < 0) break;
      }
    }
  }
}

TEST_CASE("repair leaves no broken occurrence behind") {
  int checked = 0;
  for (uint32_t seed = 1; seed <= 300; ++seed) {
    CAPTURE(seed);
    Scenario sc;
    try {
      sc = load_scenario(fixtures::random_mission(seed));
    } catch (const Error&) {
      continue;
    }
    Nba nba = prune(sc.nba);
    const FailureEvent& ev = sc.failures.front();
    FailureOutcome fo = apply_failure(sc.capabilities, ev, assigned_tasks(nba, sc.preds, 0));
    auto broken = broken_predicates(nba, 0, sc.preds, fo.z);
    RepairResult r = repair(nba, 0, broken, sc.preds, fo.z, sc.penalties);
    CHECK(broken_predicates(r.nba, 0, sc.preds, fo.z).empty());
    CHECK(std::is_sorted(r.edges.begin(), r.edges.end()));
    for (const Edge& e : r.edges) CHECK(r.nba.guard(e.from, e.to) != nullptr);
    // Unassigned literals stay unassigned from then on.
    for (const auto& [e, g] : nba.transitions())
      for (size_t d = 0; d < g.disjuncts.size(); ++d)
        for (const Literal& l : g.disjuncts[d])
          if (l.kind == LiteralKind::PositiveApply && l.robot == kUnassigned) {
            const auto& after = r.nba.guard(e.from, e.to)->disjuncts[d];
            CHECK(std::find(after.begin(), after.end(), l) != after.end());
          }
    ++checked;
  }
  CHECK(checked > 100);
}
