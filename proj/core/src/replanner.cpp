#include "mvplan/replanner.hpp"

#include <algorithm>
#include <map>

#include "mvplan/errors.hpp"

namespace mvplan {

const HybridState& extended_at(const HybridPlan& plan, size_t k) {
  return k == plan.length() ? plan.suffix.front() : plan.at(k);
}

HybridPlan rebase(const HybridPlan& plan, size_t k) {
  HybridPlan out;
  out.suffix = plan.suffix;
  if (k < plan.prefix.size()) {
    out.prefix.assign(plan.prefix.begin() + static_cast<long>(k), plan.prefix.end());
  } else {
    size_t i = (k - plan.prefix.size()) % plan.suffix.size();
    out.prefix.assign(plan.suffix.begin() + static_cast<long>(i), plan.suffix.end());
  }
  out.violation = plan.violation;
  return out;
}

PlanProjection project_plan(const HybridPlan& plan, size_t k) {
  PlanProjection p;
  const size_t t1 = plan.prefix.size();  // first suffix step
  const size_t end = plan.length();      // wrap back to the suffix head
  if (k < t1) {
    p.pre.push_back(plan.at(k).q);
    p.z_pre.push_back(k);
    for (size_t i = k + 1; i <= t1; ++i)
      if (extended_at(plan, i).q != extended_at(plan, i - 1).q) {
        p.pre.push_back(extended_at(plan, i).q);
        p.z_pre.push_back(i);
      }
  } else {
    p.pre.push_back(plan.at(t1).q);
    p.z_pre.push_back(t1);
  }
  p.suf.push_back(plan.at(t1).q);
  p.z_suf.push_back(t1);
  for (size_t i = t1 + 1; i <= end; ++i)
    if (extended_at(plan, i).q != extended_at(plan, i - 1).q) {
      p.suf.push_back(extended_at(plan, i).q);
      p.z_suf.push_back(i);
    }
  if (p.z_suf.back() != end) {
    p.suf.push_back(plan.suffix.front().q);
    p.z_suf.push_back(end);
  }
  return p;
}

namespace {

using RecentMap = std::map<RobotId, std::pair<SkillId, RegionId>>;

struct Part {
  std::vector<StateId> states;
  std::vector<int> choices;
};

Part cheapest_prefix(const StatePath& s) {
  Part p;
  p.states = s.prefix();
  p.choices.assign(s.choices.begin(), s.choices.begin() + (s.split - 1));
  return p;
}

Part cheapest_suffix(const StatePath& s) {
  Part p;
  p.states = s.suffix();
  p.choices.assign(s.choices.begin() + (s.split - 1), s.choices.end());
  return p;
}

void absorb_literals(RecentMap& m, const Conjunct& c, const PredicateTable& preds) {
  for (const Literal& l : c)
    if (l.kind == LiteralKind::PositiveApply && l.robot >= 0) {
      const ApplyPredicate& p = preds.apply(l.pred);
      m[l.robot] = {p.skill, p.region};
    }
}

void absorb_state(RecentMap& m, const HybridState& h, const WorldModel& w) {
  for (size_t j = 0; j < h.skills.size(); ++j) {
    if (h.skills[j] == kIdle) continue;
    auto r = w.region_at(h.positions[j]);
    if (r) m[static_cast<RobotId>(j)] = {h.skills[j], *r};
  }
}

// Can old steps k1..k2 be reused for edge e? Waiting steps must satisfy the
// revised self-loop, the last step the revised chosen disjunct, and every
// applied skill must still be held.
bool reusable_span(const HybridPlan& plan, size_t k1, size_t k2, Edge e, const Conjunct& fire,
                   const PlanContext& ctx) {
  const GuardDNF* loop = ctx.nba.self_loop(e.from);
  for (size_t k = k1; k < k2; ++k) {
    const HybridState& h = extended_at(plan, k);
    for (size_t j = 0; j < h.skills.size(); ++j)
      if (h.skills[j] != kIdle && !ctx.z.has(static_cast<RobotId>(j), h.skills[j])) return false;
    Symbol s = label(h.positions, h.skills, ctx.world, ctx.z);
    if (k + 1 < k2) {
      if (!loop || !satisfies(s, *loop, ctx.preds)) return false;
    } else if (!satisfies(s, fire, ctx.preds)) {
      return false;
    }
  }
  return true;
}

// Longest chain of pairs increasing in both m and m_bar; ties keep the
// lexicographically smallest (m, m_bar) sequence.
std::vector<OverlapEdge> best_chain(std::vector<OverlapEdge> cand) {
  std::sort(cand.begin(), cand.end(), [](const OverlapEdge& a, const OverlapEdge& b) {
    return std::tie(a.m, a.m_bar) < std::tie(b.m, b.m_bar);
  });
  const size_t n = cand.size();
  std::vector<int> len(n, 1), next(n, -1);
  for (size_t i = n; i-- > 0;)
    for (size_t j = i + 1; j < n; ++j)
      if (cand[j].m > cand[i].m && cand[j].m_bar > cand[i].m_bar && len[j] + 1 > len[i]) {
        len[i] = len[j] + 1;
        next[i] = static_cast<int>(j);
      }
  int start = -1;
  for (size_t i = 0; i < n; ++i)
    if (start < 0 || len[i] > len[static_cast<size_t>(start)]) start = static_cast<int>(i);
  std::vector<OverlapEdge> out;
  for (int i = start; i >= 0; i = next[static_cast<size_t>(i)]) out.push_back(cand[static_cast<size_t>(i)]);
  return out;
}

}  // namespace

TrueOverlap true_overlap(const StatePath& cheapest, const PlanProjection& proj, const HybridPlan& plan,
                         const PlanContext& ctx) {
  TrueOverlap out;
  const Part parts[2] = {cheapest_prefix(cheapest), cheapest_suffix(cheapest)};
  const std::vector<StateId>* old_q_parts[2] = {&proj.pre, &proj.suf};
  const std::vector<size_t>* old_step_parts[2] = {&proj.z_pre, &proj.z_suf};

  // Most-recent maps at each position, prefix carried into the suffix.
  RecentMap cand_map, old_map;
  std::vector<RecentMap> cand_at[2], old_at[2];
  for (int part = 0; part < 2; ++part) {
    const Part& cand = parts[part];
    for (size_t m = 0; m < cand.states.size(); ++m) {
      cand_at[part].push_back(cand_map);
      if (m + 1 < cand.states.size()) {
        const GuardDNF* g = ctx.nba.guard(cand.states[m], cand.states[m + 1]);
        absorb_literals(cand_map, g->disjuncts[static_cast<size_t>(cand.choices[m])], ctx.preds);
      }
    }
    const auto& old_q = *old_q_parts[part];
    const auto& old_step = *old_step_parts[part];
    for (size_t m = 0; m < old_q.size(); ++m) {
      old_at[part].push_back(old_map);
      if (m + 1 < old_q.size()) absorb_state(old_map, extended_at(plan, old_step[m + 1] - 1), ctx.world);
    }
  }

  std::vector<OverlapEdge> good[2];
  for (int part = 0; part < 2; ++part) {
    const Part& cand = parts[part];
    const auto& old_q = *old_q_parts[part];
    const auto& old_step = *old_step_parts[part];
    for (size_t m = 0; m + 1 < cand.states.size(); ++m)
      for (size_t mb = 0; mb + 1 < old_q.size(); ++mb) {
        if (cand.states[m] != old_q[mb] || cand.states[m + 1] != old_q[mb + 1]) continue;
        OverlapEdge oe{part == 1, static_cast<int>(m), static_cast<int>(mb), old_step[mb], old_step[mb + 1]};
        out.overlap.push_back(oe);
        if (cand_at[part][m] != old_at[part][mb]) continue;  // same robots on the same tasks
        Edge e{cand.states[m], cand.states[m + 1]};
        const Conjunct& fire = ctx.nba.guard(e.from, e.to)->disjuncts[static_cast<size_t>(cand.choices[m])];
        if (!reusable_span(plan, oe.k1, oe.k2, e, fire, ctx)) continue;  // old span still legal
        good[part].push_back(oe);
      }
  }
  for (int part = 0; part < 2; ++part) {
    auto chain = best_chain(good[part]);
    out.kept.insert(out.kept.end(), chain.begin(), chain.end());
  }
  return out;
}

namespace {

struct Builder {
  std::vector<HybridState> states;
  bool end_fresh = false;

  void add(const Segment& s) {
    if (s.states.empty()) return;
    if (end_fresh && !states.empty()) states.pop_back();
    states.insert(states.end(), s.states.begin(), s.states.end());
    end_fresh = s.end_fresh;
  }
  void add_span(const HybridPlan& plan, size_t k1, size_t k2) {
    if (end_fresh && !states.empty()) states.pop_back();
    for (size_t k = k1; k <= k2; ++k) states.push_back(extended_at(plan, k));
    end_fresh = true;
  }
};

Segment run_connect(const HybridState& start, bool fresh, GoalKind kind, const HybridState& goal, const Part& cand,
                    size_t from, size_t to, const PlanContext& ctx) {
  SegmentSpec spec;
  spec.start = start;
  spec.start.q = cand.states[from];
  spec.start_fresh = fresh;
  spec.goal_kind = kind;
  spec.goal = goal;
  spec.corridor.assign(cand.states.begin() + static_cast<long>(from), cand.states.begin() + static_cast<long>(to) + 1);
  spec.choices.assign(cand.choices.begin() + static_cast<long>(from), cand.choices.begin() + static_cast<long>(to));
  return connect(spec, ctx);
}

}  // namespace

std::optional<ReplanResult> replan_local(const HybridPlan& plan, const StatePath& cheapest, const PlanContext& ctx) {
  PlanProjection proj = project_plan(plan, 0);
  TrueOverlap to = true_overlap(cheapest, proj, plan, ctx);
  if (to.kept.empty()) return std::nullopt;
  const Part pre = cheapest_prefix(cheapest);
  const Part suf = cheapest_suffix(cheapest);
  const StateId acc = pre.states.back();
  ReplanResult res;
  res.mode = ReplanMode::Local;
  res.cheapest = cheapest;
  res.overlap = static_cast<int>(to.overlap.size());
  res.true_overlap = static_cast<int>(to.kept.size());
  try {
    // Prefix: segments between true overlaps, reusing each span.
    Builder b;
    b.states.push_back(plan.at(0));
    b.end_fresh = true;
    size_t idx = 0;
    for (const OverlapEdge& oe : to.kept) {
      if (oe.in_suffix) continue;
      const HybridState& goal = extended_at(plan, oe.k1);
      b.add(run_connect(b.states.back(), b.end_fresh, GoalKind::ExactState, goal, pre, idx,
                        static_cast<size_t>(oe.m), ctx));
      b.add_span(plan, oe.k1, oe.k2);
      res.reused.push_back({oe.k1, oe.k2});
      idx = static_cast<size_t>(oe.m) + 1;
    }
    const size_t last = pre.states.size() - 1;
    if (idx < last)
      b.add(run_connect(b.states.back(), b.end_fresh, GoalKind::ReachState, {}, pre, idx, last, ctx));

    HybridPlan out;
    const bool suffix_fresh = b.end_fresh;
    HybridState s0;  // known up front only for a fresh suffix start
    Builder sb;
    if (suffix_fresh) {
      s0 = b.states.back();
      s0.q = acc;
      out.prefix.assign(b.states.begin(), b.states.end() - 1);
      sb.states.push_back(s0);
      sb.end_fresh = true;
    } else {
      out.prefix = b.states;
    }
    const HybridState p_t = out.prefix.empty() ? s0 : out.prefix.back();

    // Suffix: start node is s0 (open) or the firing at p_t into acc.
    auto cursor = [&]() -> std::pair<HybridState, bool> {
      if (!sb.states.empty()) return {sb.states.back(), sb.end_fresh};
      HybridState h = p_t;
      h.q = acc;
      return {h, false};
    };
    idx = 0;
    for (const OverlapEdge& oe : to.kept) {
      if (!oe.in_suffix) continue;
      const HybridState& goal = extended_at(plan, oe.k1);
      auto [start, fresh] = cursor();
      sb.add(run_connect(start, fresh, GoalKind::ExactState, goal, suf, idx, static_cast<size_t>(oe.m), ctx));
      sb.add_span(plan, oe.k1, oe.k2);
      res.reused.push_back({oe.k1, oe.k2});
      idx = static_cast<size_t>(oe.m) + 1;
    }
    const size_t slast = suf.states.size() - 1;
    if (idx < slast || sb.states.empty()) {
      auto [start, fresh] = cursor();
      if (!sb.states.empty()) {
        HybridState goal = sb.states.front();
        goal.q = acc;
        sb.add(run_connect(start, fresh, GoalKind::ExactState, goal, suf, idx, slast, ctx));
        sb.states.pop_back();
      } else {
        HybridState goal = p_t;
        goal.q = acc;
        sb.add(run_connect(start, fresh, GoalKind::ExactFiring, goal, suf, idx, slast, ctx));
      }
    } else {
      // Ended on a reused span at the open accepting state.
      const HybridState& s_first = sb.states.front();
      if (sb.states.back().positions != s_first.positions) {
        HybridState goal = s_first;
        goal.q = acc;
        Part stay{{acc}, {}};
        sb.add(run_connect(sb.states.back(), true, GoalKind::ExactState, goal, stay, 0, 0, ctx));
      }
      sb.states.pop_back();
    }
    out.suffix = std::move(sb.states);
    if (out.suffix.empty()) return std::nullopt;
    if (!check_plan(out, ctx).empty()) return std::nullopt;
    out.violation = plan_violation(out, 0, ctx);
    res.plan = std::move(out);
  } catch (const SegmentInfeasible&) {
    return std::nullopt;
  }
  return res;
}

ReplanResult replan_global(const HybridPlan& plan, const PlanContext& ctx) {
  ReplanResult res;
  res.mode = ReplanMode::Global;
  res.plan = synthesize(ctx, plan.at(0).positions, plan.at(0).q);
  return res;
}

ReplanResult replan(const HybridPlan& plan, const PlanContext& ctx) {
  const StateId q_cur = plan.at(0).q;
  std::vector<StatePath> cands;
  try {
    cands = enumerate_paths(ctx.nba, q_cur, unassigned_map(ctx.nba), ctx.penalties);
  } catch (const NoAcceptingPath& e) {
    throw Infeasible(e.what());
  }
  const Cost best = cands.front().cost;
  std::vector<StatePath> tied;
  for (const StatePath& s : cands) {
    if (s.cost != best) break;
    tied.push_back(s);
  }
  PlanProjection proj = project_plan(plan, 0);
  std::vector<std::pair<int, size_t>> order;
  for (size_t i = 0; i < tied.size(); ++i)
    order.push_back({-static_cast<int>(true_overlap(tied[i], proj, plan, ctx).kept.size()), i});
  std::stable_sort(order.begin(), order.end());
  for (const auto& [neg, i] : order) {
    if (neg == 0) break;
    if (auto r = replan_local(plan, tied[i], ctx)) return *r;
  }
  ReplanResult g = replan_global(plan, ctx);
  g.cheapest = tied.front();
  return g;
}

std::string to_string(ReplanMode m) { return m == ReplanMode::Local ? "local" : "global"; }

}  // namespace mvplan
