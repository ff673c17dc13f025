#include "doctest.h"
#include "fixtures.hpp"
#include "mvplan/errors.hpp"
#include "mvplan/oracles.hpp"

using namespace mvplan;

TEST_CASE("guard cost equals the exhaustive minimum") {
  for (uint32_t seed = 1; seed <= 600; ++seed) {
    CAPTURE(seed);
    auto g = fixtures::random_guard(seed, 8);
    CHECK(edge_violation(g.symbol, g.guard, g.preds, g.f) == oracle::brute_edge_violation(g.symbol, g.guard, g.preds, g.f));
  }
}

TEST_CASE("zero cost exactly when a fully assigned disjunct holds") {
  for (uint32_t seed = 1; seed <= 600; ++seed) {
    CAPTURE(seed);
    auto g = fixtures::random_guard(seed);
    bool some = false;
    for (const Conjunct& c : g.guard.disjuncts)
      some |= satisfies(g.symbol, c, g.preds) && unassigned_cost(c, g.f).is_zero();
    CHECK(edge_violation(g.symbol, g.guard, g.preds, g.f).is_zero() == some);
  }
}

TEST_CASE("extra harmless atoms never raise the cost") {
  for (uint32_t seed = 1; seed <= 600; ++seed) {
    CAPTURE(seed);
    auto g = fixtures::random_guard(seed);
    Cost before = edge_violation(g.symbol, g.guard, g.preds, g.f);
    for (const Conjunct& c : g.guard.disjuncts)
      for (const Literal& l : c) {
        if (l.kind != LiteralKind::PositiveApply || l.robot < 0) continue;
        const ApplyPredicate& p = g.preds.apply(l.pred);
        Symbol more = g.symbol;
        Atom a{l.robot, p.skill, p.region};
        if (more.has_atom(a.robot, a.skill, a.region)) continue;
        more.atoms.push_back(a);
        more.presence.push_back({a.robot, a.region});
        bool harmful = false;
        for (const Conjunct& d : g.guard.disjuncts)
          for (const Literal& m : d) {
            if (m.kind == LiteralKind::NegatedApply && m.robot == a.robot && g.preds.apply(m.pred).skill == a.skill &&
                g.preds.apply(m.pred).region == a.region)
              harmful = true;
            if (m.kind == LiteralKind::Avoid && avoid_violated(more, g.preds.avoid(m.pred), 1) &&
                !avoid_violated(g.symbol, g.preds.avoid(m.pred), 1))
              harmful = true;
          }
        if (!harmful) CHECK(edge_violation(more, g.guard, g.preds, g.f) <= before);
      }
  }
}

TEST_CASE("a completion that needs an avoid is infinite") {
  for (uint32_t seed = 1; seed <= 300; ++seed) {
    CAPTURE(seed);
    auto g = fixtures::random_guard(seed);
    for (const Conjunct& c : g.guard.disjuncts) {
      bool broken_avoid = false;
      for (const Literal& l : c)
        if (l.kind == LiteralKind::Avoid && avoid_violated(g.symbol, g.preds.avoid(l.pred), 1)) broken_avoid = true;
      if (broken_avoid) CHECK(completion_cost(g.symbol, c, g.preds, g.f).is_infinite());
    }
  }
}

TEST_CASE("pruned automata never overload a robot") {
  for (uint32_t seed = 1; seed <= 200; ++seed) {
    CAPTURE(seed);
    Scenario sc;
    try {
      sc = load_scenario(fixtures::random_mission(seed));
    } catch (const Error&) {
      continue;
    }
    const Nba pruned = prune(sc.nba);
    for (const auto& [e, g] : pruned.transitions())
      for (const Conjunct& c : g.disjuncts) CHECK_FALSE(conjunct_overloads_robot(c));
  }
}
