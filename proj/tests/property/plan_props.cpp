#include "doctest.h"
#include "fixtures.hpp"
#include "mvplan/errors.hpp"
#include "mvplan/oracles.hpp"

using namespace mvplan;

namespace {

struct Offline {
  Scenario sc;
  Nba nba;
  HybridPlan plan;
  PlanContext ctx() const { return {nba, sc.preds, sc.penalties, sc.world, sc.capabilities}; }
};

std::optional<Offline> offline(uint32_t seed) {
  Offline o;
  try {
    o.sc = load_scenario(fixtures::random_mission(seed));
    o.nba = prune(o.sc.nba);
    o.plan = synthesize(o.ctx(), o.sc.start);
  } catch (const Error&) {
    return std::nullopt;
  }
  return o;
}

}  // namespace

TEST_CASE("offline plans are legal, replay to their stored cost and match the exhaustive optimum") {
  int checked = 0;
  for (uint32_t seed = 1; checked < 40 && seed < 400; ++seed) {
    CAPTURE(seed);
    auto o = offline(seed);
    if (!o) continue;
    CHECK(check_plan(o->plan, o->ctx()).empty());
    CHECK(plan_violation(o->plan, 0, o->ctx()) == o->plan.violation);
    auto best = oracle::brute_product_plan(o->nba, o->sc.preds, o->sc.penalties, o->sc.world, o->sc.capabilities,
                                           o->sc.start, o->nba.initial().front());
    CHECK(o->plan.violation == best.violation);
    ++checked;
  }
  CHECK(checked == 40);
}

TEST_CASE("no plan step ever breaks an avoid literal of the transition it takes") {
  auto check = [](const HybridPlan& plan, const PlanContext& ctx) {
    for (size_t k = 0; k < plan.length(); ++k) {
      const HybridState& h = plan.at(k);
      Symbol s = label(h.positions, h.skills, ctx.world, ctx.z);
      const GuardDNF* g = ctx.nba.guard(h.q, plan.next_q(k));
      REQUIRE(g != nullptr);
      bool some = false;
      for (const Conjunct& c : g->disjuncts) {
        bool clean = true;
        for (const Literal& l : c)
          if (l.kind == LiteralKind::Avoid && avoid_violated(s, ctx.preds.avoid(l.pred), ctx.preds.mobility_skill()))
            clean = false;
        some |= clean && satisfies(s, c, ctx.preds);
      }
      CHECK(some);
    }
  };
  for (uint32_t seed = 1; seed <= 150; ++seed) {
    CAPTURE(seed);
    auto o = offline(seed);
    if (o) check(o->plan, o->ctx());
    auto rc = fixtures::replan_case(seed);
    if (rc) check(rc->result.plan, {rc->nba, rc->sc.preds, rc->sc.penalties, rc->sc.world, rc->z});
  }
}

TEST_CASE("replanned plans start where the team stands and are legal") {
  int checked = 0;
  for (uint32_t seed = 1; seed <= 200; ++seed) {
    CAPTURE(seed);
    auto rc = fixtures::replan_case(seed);
    if (!rc) continue;
    PlanContext ctx{rc->nba, rc->sc.preds, rc->sc.penalties, rc->sc.world, rc->z};
    const HybridPlan& p = rc->result.plan;
    CHECK(check_plan(p, ctx).empty());
    CHECK(p.at(0).positions == rc->current.at(0).positions);
    CHECK(p.at(0).q == rc->q_cur);
    CHECK(plan_violation(p, 0, ctx) == p.violation);
    // Nothing beats the cheapest automaton path.
    CHECK(p.violation >= rc->result.cheapest.cost);
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("global replanning is optimal on small cases") {
  int checked = 0;
  for (uint32_t seed = 1; checked < 15 && seed < 400; ++seed) {
    CAPTURE(seed);
    auto rc = fixtures::replan_case(seed);
    if (!rc || rc->result.mode != ReplanMode::Global) continue;
    auto best = oracle::brute_product_plan(rc->nba, rc->sc.preds, rc->sc.penalties, rc->sc.world, rc->z,
                                           rc->current.at(0).positions, rc->q_cur);
    CHECK(rc->result.plan.violation == best.violation);
    ++checked;
  }
  CHECK(checked == 15);
}
