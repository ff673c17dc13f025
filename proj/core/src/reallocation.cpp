#include "mvplan/reallocation.hpp"

#include <algorithm>
#include <deque>

#include "mvplan/errors.hpp"

namespace mvplan {

bool AssignmentContext::may_take(RobotId to, PredId pred, const PredicateTable& preds) const {
  const auto& v = forbidden.at(static_cast<size_t>(to));
  if (v.empty()) return true;
  const ApplyPredicate& p = preds.apply(pred);
  return !v.count({p.skill, p.region}) && !v.count({kAnySkill, p.region});
}

AssignmentContext build_context(const Conjunct& c, const PredicateTable& preds, int robot_count, PredId failed,
                                RobotId robot) {
  auto broken = std::find(c.begin(), c.end(), Literal{LiteralKind::PositiveApply, failed, robot});
  if (broken == c.end()) throw FailedPredicateAbsent("conjunct does not hold predicate " + preds.apply(failed).name);

  AssignmentContext ctx;
  ctx.root = robot;
  ctx.failed = failed;
  ctx.busy.assign(static_cast<size_t>(robot_count), -1);
  ctx.forbidden.assign(static_cast<size_t>(robot_count), {});
  for (const Literal& l : c) {
    switch (l.kind) {
      case LiteralKind::PositiveApply:
        if (l.robot < 0) break;
        ctx.robots_in_formula.insert(l.robot);
        if (l.pred == failed && l.robot == robot) break;
        if (ctx.busy[static_cast<size_t>(l.robot)] < 0) ctx.busy[static_cast<size_t>(l.robot)] = l.pred;
        break;
      case LiteralKind::NegatedApply: {
        if (l.robot < 0) break;
        ctx.robots_in_formula.insert(l.robot);
        const ApplyPredicate& p = preds.apply(l.pred);
        ctx.forbidden[static_cast<size_t>(l.robot)].insert({p.skill, p.region});
        break;
      }
      case LiteralKind::Avoid: {
        const AvoidPredicate& a = preds.avoid(l.pred);
        SkillId s = a.skill == preds.mobility_skill() ? kAnySkill : a.skill;
        for (RobotId j : a.subjects) {
          if (j < 0 || j >= robot_count) continue;
          ctx.robots_in_formula.insert(j);
          ctx.forbidden[static_cast<size_t>(j)].insert({s, a.region});
        }
        break;
      }
    }
  }
  for (RobotId j = 0; j < robot_count; ++j)
    if (ctx.busy[static_cast<size_t>(j)] < 0) ctx.free.insert(j);
  return ctx;
}

ReassignPath bfs_reassign(const AssignmentContext& ctx, const PredicateTable& preds, const Teams& teams,
                          const PenaltyMap& f) {
  const SkillId failed_skill = preds.apply(ctx.failed).skill;
  if (static_cast<size_t>(failed_skill) >= teams.size() || teams[static_cast<size_t>(failed_skill)].empty())
    throw NoCandidate("no robot holds skill " + std::to_string(failed_skill));

  const size_t n = ctx.busy.size();
  std::vector<RobotId> parent(n, -1);
  std::vector<char> explored(n, 0);  // the root starts unexplored
  auto path_to = [&](RobotId end) {
    std::vector<RobotId> p{end};
    // The root may reappear as terminal; stop once we are back at it.
    for (RobotId a = parent[static_cast<size_t>(end)]; a >= 0; a = a == ctx.root ? -1 : parent[static_cast<size_t>(a)])
      p.push_back(a);
    if (p.back() != ctx.root) p.push_back(ctx.root);
    std::reverse(p.begin(), p.end());
    return p;
  };

  RobotId best = ctx.root;
  Cost best_cost = f.apply(ctx.failed);
  std::deque<RobotId> queue{ctx.root};
  bool root_expanded = false;
  while (!queue.empty()) {
    RobotId a = queue.front();
    queue.pop_front();
    PredId task = (a == ctx.root && !root_expanded) ? ctx.failed : ctx.busy[static_cast<size_t>(a)];
    if (a == ctx.root) root_expanded = true;
    if (task < 0) continue;
    SkillId c = preds.apply(task).skill;
    if (static_cast<size_t>(c) >= teams.size()) continue;
    for (RobotId next : teams[static_cast<size_t>(c)]) {
      if (explored[static_cast<size_t>(next)]) continue;
      if (next == ctx.root && a == ctx.root) continue;
      if (!ctx.may_take(next, task, preds)) continue;
      explored[static_cast<size_t>(next)] = 1;
      parent[static_cast<size_t>(next)] = a;
      if (ctx.free.count(next)) {
        ReassignPath out;
        out.robots = next == ctx.root ? path_to(a) : path_to(next);
        if (next == ctx.root) out.robots.push_back(ctx.root);
        return out;
      }
      Cost pen = f.apply(ctx.busy[static_cast<size_t>(next)]);
      if (pen < best_cost) {
        best_cost = pen;
        best = next;
      }
      queue.push_back(next);
    }
  }
  ReassignPath out;
  out.robots = best == ctx.root ? std::vector<RobotId>{ctx.root} : path_to(best);
  out.sacrificed = best == ctx.root ? ctx.failed : ctx.busy[static_cast<size_t>(best)];
  out.cost = best_cost;
  return out;
}

std::vector<PredId> broken_predicates(const Nba& nba, StateId q_cur, const PredicateTable& preds,
                                      const CapabilityMatrix& z) {
  std::set<PredId> out;
  std::set<StateId> reach = reachable_from(nba, q_cur);
  for (const auto& [e, g] : nba.transitions()) {
    if (!reach.count(e.from) || !reach.count(e.to)) continue;
    for (const Conjunct& c : g.disjuncts)
      for (const Literal& l : c)
        if (l.kind == LiteralKind::PositiveApply && l.robot >= 0 && !z.has(l.robot, preds.apply(l.pred).skill))
          out.insert(l.pred);
  }
  return {out.begin(), out.end()};
}

namespace {

// Rewrites one conjunct along the path: robot p(k+1) takes the task p(k)
// held (the failed predicate for the root); the sacrificed task loses its robot.
void apply_path(Conjunct& c, const AssignmentContext& ctx, const ReassignPath& path) {
  auto rebind = [&](PredId pred, RobotId from, RobotId to) {
    for (Literal& l : c)
      if (l.kind == LiteralKind::PositiveApply && l.pred == pred && l.robot == from) {
        l.robot = to;
        return;
      }
  };
  // Walk backwards so each handover sees the original holder.
  std::vector<std::pair<PredId, RobotId>> held;  // task each path node gives away
  for (size_t k = 0; k + 1 < path.robots.size(); ++k) {
    RobotId a = path.robots[k];
    held.push_back({k == 0 ? ctx.failed : ctx.busy[static_cast<size_t>(a)], a});
  }
  if (path.sacrificed >= 0) {
    RobotId last = path.robots.back();
    PredId task = path.robots.size() == 1 ? ctx.failed : ctx.busy[static_cast<size_t>(last)];
    rebind(task, last, kUnassigned);
  }
  for (size_t k = held.size(); k-- > 0;) rebind(held[k].first, held[k].second, path.robots[k + 1]);
  normalize(c);
}

}  // namespace

RepairResult repair(const Nba& nba, StateId q_cur, const std::vector<PredId>& failed, const PredicateTable& preds,
                    const CapabilityMatrix& z, const PenaltyMap& f) {
  RepairResult out;
  out.nba = nba;
  Teams t = teams(z);
  std::set<Edge> touched;
  for (PredId pi : failed) {
    SkillId skill = preds.apply(pi).skill;
    FailedEdgeSet es = failed_edges(out.nba, q_cur, pi);
    for (const Edge& e : es.edges) {
      GuardDNF g = *out.nba.guard(e.from, e.to);
      bool changed = false;
      for (size_t d = 0; d < g.disjuncts.size(); ++d) {
        Conjunct& c = g.disjuncts[d];
        auto broken = std::find_if(c.begin(), c.end(), [&](const Literal& l) {
          return l.kind == LiteralKind::PositiveApply && l.pred == pi && l.robot >= 0 && !z.has(l.robot, skill);
        });
        if (broken == c.end()) continue;
        RobotId root = broken->robot;
        AssignmentContext ctx = build_context(c, preds, z.robot_count(), pi, root);
        ReassignPath path;
        try {
          path = bfs_reassign(ctx, preds, t, f);
        } catch (const NoCandidate&) {
          path.robots = {root};
          path.sacrificed = pi;
          path.cost = f.apply(pi);
        }
        apply_path(c, ctx, path);
        changed = true;
        out.log.push_back({0, pi, e, static_cast<int>(d), path.robots, path.sacrificed, path.cost});
      }
      touched.insert(e);
      if (changed) out.nba.set_guard(e, std::move(g));
    }
  }
  out.edges.assign(touched.begin(), touched.end());
  return out;
}

}  // namespace mvplan
