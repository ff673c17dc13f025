#include "mvplan/oracles.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <tuple>

#include "mvplan/errors.hpp"

namespace mvplan::oracle {

namespace {

using AtomKey = std::tuple<RobotId, SkillId, RegionId>;

struct World {
  std::set<AtomKey> atoms;
  std::set<std::pair<RobotId, RegionId>> at;  // presence
};

bool conj_holds(const World& w, const Conjunct& c, const PredicateTable& preds, const std::set<PredId>& faked) {
  for (const Literal& l : c) {
    if (l.kind == LiteralKind::Avoid) {
      const AvoidPredicate& a = preds.avoid(l.pred);
      for (RobotId j : a.subjects) {
        if (a.skill == preds.mobility_skill()) {
          if (w.at.count({j, a.region})) return false;
          for (const auto& [r, s, g] : w.atoms)
            if (r == j && g == a.region) return false;
        } else if (w.atoms.count({j, a.skill, a.region})) {
          return false;
        }
      }
      continue;
    }
    const ApplyPredicate& p = preds.apply(l.pred);
    if (l.kind == LiteralKind::PositiveApply) {
      if (l.robot < 0) {
        if (!faked.count(l.pred)) return false;
      } else if (!w.atoms.count({l.robot, p.skill, p.region})) {
        return false;
      }
    } else if (l.robot >= 0 && w.atoms.count({l.robot, p.skill, p.region})) {
      return false;
    }
  }
  return true;
}

}  // namespace

Cost brute_edge_violation(const Symbol& s, const GuardDNF& g, const PredicateTable& preds, const PenaltyMap& f) {
  World base;
  for (const Atom& a : s.atoms) base.atoms.insert({a.robot, a.skill, a.region});
  for (const Presence& p : s.presence) base.at.insert({p.robot, p.region});

  // Free variables: atoms of positive literals not already present, and
  // unassigned predicates.
  std::map<AtomKey, Cost> atom_vars;
  std::map<PredId, Cost> free_preds;
  for (const Conjunct& c : g.disjuncts)
    for (const Literal& l : c) {
      if (l.kind != LiteralKind::PositiveApply) continue;
      if (l.robot < 0) {
        free_preds[l.pred] = f.apply(l.pred);
        continue;
      }
      const ApplyPredicate& p = preds.apply(l.pred);
      AtomKey k{l.robot, p.skill, p.region};
      if (base.atoms.count(k)) continue;
      auto it = atom_vars.find(k);
      if (it == atom_vars.end() || f.apply(l.pred) < it->second) atom_vars[k] = f.apply(l.pred);
    }
  const size_t nv = atom_vars.size() + free_preds.size();
  if (nv > 12) throw TooLarge("brute_edge_violation: more than 12 free variables");
  std::vector<std::pair<AtomKey, Cost>> av(atom_vars.begin(), atom_vars.end());
  std::vector<std::pair<PredId, Cost>> pv(free_preds.begin(), free_preds.end());

  Cost best = Cost::infinity();
  for (unsigned mask = 0; mask < (1u << nv); ++mask) {
    World w = base;
    std::set<PredId> faked;
    Cost c;
    for (size_t i = 0; i < nv; ++i) {
      if (!(mask & (1u << i))) continue;
      if (i < av.size()) {
        w.atoms.insert(av[i].first);
        c += av[i].second;
      } else {
        faked.insert(pv[i - av.size()].first);
        c += pv[i - av.size()].second;
      }
    }
    if (!(c < best)) continue;
    for (const Conjunct& cj : g.disjuncts)
      if (conj_holds(w, cj, preds, faked)) {
        best = c;
        break;
      }
  }
  return best;
}

ReassignOptimum brute_reassign(const AssignmentContext& ctx, const PredicateTable& preds, const Teams& teams,
                               const PenaltyMap& f) {
  const int n = static_cast<int>(ctx.busy.size());
  if (n > 8) throw TooLarge("brute_reassign: more than 8 robots");
  auto blocked = [&](RobotId to, PredId task) {
    const ApplyPredicate& p = preds.apply(task);
    for (const Fragment& fr : ctx.forbidden[static_cast<size_t>(to)])
      if (fr.region == p.region && (fr.skill == kAnySkill || fr.skill == p.skill)) return true;
    return false;
  };
  ReassignOptimum best{f.apply(ctx.failed), 0};
  auto offer = [&](Cost c, int hops) {
    if (c < best.cost || (c == best.cost && hops < best.hops)) best = {c, hops};
  };
  std::vector<char> on(static_cast<size_t>(n), 0);
  on[static_cast<size_t>(ctx.root)] = 1;
  std::function<void(PredId, int)> walk = [&](PredId task, int depth) {
    SkillId c = preds.apply(task).skill;
    if (static_cast<size_t>(c) >= teams.size()) return;
    for (RobotId b : teams[static_cast<size_t>(c)]) {
      bool closes = b == ctx.root && depth > 0;
      if (on[static_cast<size_t>(b)] && !closes) continue;
      if (blocked(b, task)) continue;
      PredId held = b == ctx.root ? -1 : ctx.busy[static_cast<size_t>(b)];
      if (held < 0) {
        offer(Cost::zero(), depth + 1);
        continue;
      }
      offer(f.apply(held), depth + 1);
      on[static_cast<size_t>(b)] = 1;
      walk(held, depth + 1);
      on[static_cast<size_t>(b)] = 0;
    }
  };
  walk(ctx.failed, 0);
  return best;
}

std::vector<int> hungarian(const std::vector<std::vector<double>>& a) {
  // Classic potentials formulation, 1-based internally.
  const size_t n = a.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(n + 1, 0);
  std::vector<size_t> p(n + 1, 0), way(n + 1, 0);
  for (size_t i = 1; i <= n; ++i) {
    p[0] = i;
    size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      size_t i0 = p[j0], j1 = 0;
      double delta = inf;
      for (size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col(n, -1);
  for (size_t j = 1; j <= n; ++j)
    if (p[j] != 0) col[p[j] - 1] = static_cast<int>(j) - 1;
  return col;
}

HungarianResult hungarian_reassign(const Conjunct& c, PredId failed, RobotId failed_robot, const PredicateTable& preds,
                                   const CapabilityMatrix& z, const PenaltyMap& f) {
  HungarianResult out;
  std::vector<RobotId> original;
  std::vector<std::set<std::pair<SkillId, RegionId>>> forbid(static_cast<size_t>(z.robot_count()));
  for (const Literal& l : c) {
    if (l.kind == LiteralKind::PositiveApply && l.robot >= 0) {
      out.tasks.push_back(l.pred);
      original.push_back(l.robot);
    } else if (l.kind == LiteralKind::NegatedApply && l.robot >= 0) {
      const ApplyPredicate& p = preds.apply(l.pred);
      forbid[static_cast<size_t>(l.robot)].insert({p.skill, p.region});
    } else if (l.kind == LiteralKind::Avoid) {
      const AvoidPredicate& a = preds.avoid(l.pred);
      for (RobotId j : a.subjects)
        if (j >= 0 && j < z.robot_count())
          forbid[static_cast<size_t>(j)].insert({a.skill == preds.mobility_skill() ? kAnySkill : a.skill, a.region});
    }
  }
  (void)failed;
  (void)failed_robot;
  const size_t tasks = out.tasks.size();
  const size_t robots = static_cast<size_t>(z.robot_count());
  const size_t n = std::max(tasks, robots);
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  auto ok = [&](size_t t, size_t r) {
    const ApplyPredicate& p = preds.apply(out.tasks[t]);
    if (!z.has(static_cast<RobotId>(r), p.skill)) return false;
    const auto& fb = forbid[r];
    return !fb.count({p.skill, p.region}) && !fb.count({kAnySkill, p.region});
  };
  for (size_t t = 0; t < tasks; ++t)
    for (size_t r = 0; r < n; ++r) m[t][r] = (r < robots && ok(t, r)) ? 0.0 : f.apply(out.tasks[t]).value();
  std::vector<int> col = hungarian(m);
  for (size_t t = 0; t < tasks; ++t) {
    auto r = static_cast<size_t>(col[t]);
    if (r < robots && ok(t, r)) {
      out.robot_of_task.push_back(static_cast<RobotId>(r));
      if (static_cast<RobotId>(r) != original[t]) ++out.reassigned;
    } else {
      out.robot_of_task.push_back(-1);
      out.violation += f.apply(out.tasks[t]);
    }
  }
  return out;
}

ProductOptimum brute_product_plan(const Nba& nba, const PredicateTable& preds, const PenaltyMap& f,
                                  const WorldModel& world, const CapabilityMatrix& z, const std::vector<Cell>& start,
                                  StateId q0) {
  const int n = world.robot_count();
  std::vector<Cell> free;
  std::map<Cell, int> id;
  for (int y = 0; y < world.height(); ++y)
    for (int x = 0; x < world.width(); ++x)
      if (world.is_free({x, y})) {
        id[{x, y}] = static_cast<int>(free.size());
        free.push_back({x, y});
      }
  const long cells = static_cast<long>(free.size());
  long configs = 1;
  for (int j = 0; j < n; ++j) {
    configs *= cells;
    if (configs * nba.size() > 1'000'000) throw TooLarge("brute_product_plan: product exceeds 10^6 states");
  }
  const long Q = nba.size();

  std::vector<std::vector<int>> moves(free.size());
  for (size_t c = 0; c < free.size(); ++c)
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy) {
        Cell nb{free[c].x + dx, free[c].y + dy};
        if (world.is_free(nb)) moves[c].push_back(id[nb]);
      }
  auto decode = [&](long cfg) {
    std::vector<int> p(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
      p[static_cast<size_t>(j)] = static_cast<int>(cfg % cells);
      cfg /= cells;
    }
    return p;
  };
  auto encode = [&](const std::vector<int>& p) {
    long cfg = 0;
    for (int j = n - 1; j >= 0; --j) cfg = cfg * cells + p[static_cast<size_t>(j)];
    return cfg;
  };

  // Cheapest way (over skill choices) for configuration p to take q -> q'.
  auto step_cost = [&](const std::vector<int>& p, const GuardDNF& g) {
    std::vector<std::vector<SkillId>> options(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
      options[static_cast<size_t>(j)].push_back(kIdle);
      if (world.region_at(free[static_cast<size_t>(p[static_cast<size_t>(j)])]))
        for (SkillId c = 1; c <= z.skill_count(); ++c)
          if (z.has(j, c)) options[static_cast<size_t>(j)].push_back(c);
    }
    Cost best = Cost::infinity();
    std::vector<size_t> pick(static_cast<size_t>(n), 0);
    while (true) {
      World w;
      for (int j = 0; j < n; ++j) {
        Cell cell = free[static_cast<size_t>(p[static_cast<size_t>(j)])];
        auto r = world.region_at(cell);
        if (!r) continue;
        w.at.insert({j, *r});
        SkillId s = options[static_cast<size_t>(j)][pick[static_cast<size_t>(j)]];
        if (s != kIdle) w.atoms.insert({j, s, *r});
      }
      for (const Conjunct& c : g.disjuncts) {
        std::set<PredId> unassigned;
        Cost u;
        for (const Literal& l : c)
          if (l.kind == LiteralKind::PositiveApply && l.robot < 0 && unassigned.insert(l.pred).second) u += f.apply(l.pred);
        if (u < best && conj_holds(w, c, preds, unassigned)) best = u;
      }
      int j = 0;
      while (j < n && ++pick[static_cast<size_t>(j)] == options[static_cast<size_t>(j)].size()) {
        pick[static_cast<size_t>(j)] = 0;
        ++j;
      }
      if (j == n) break;
    }
    return best;
  };

  // Memoized outgoing automaton moves per node.
  std::map<long, std::vector<std::pair<StateId, Cost>>> memo;
  auto automaton_moves = [&](long node) -> const std::vector<std::pair<StateId, Cost>>& {
    auto it = memo.find(node);
    if (it != memo.end()) return it->second;
    long cfg = node / Q;
    auto q = static_cast<StateId>(node % Q);
    std::vector<int> p = decode(cfg);
    std::vector<std::pair<StateId, Cost>> out;
    for (const auto& [e, g] : nba.transitions()) {
      if (e.from != q) continue;
      Cost c = step_cost(p, g);
      if (!c.is_infinite()) out.push_back({e.to, c});
    }
    return memo[node] = std::move(out);
  };
  auto for_each_successor = [&](long node, const std::function<void(long, Cost)>& fn) {
    std::vector<int> p = decode(node / Q);
    const auto& am = automaton_moves(node);
    if (am.empty()) return;
    std::vector<size_t> pick(static_cast<size_t>(n), 0);
    std::vector<int> np(static_cast<size_t>(n));
    while (true) {
      for (int j = 0; j < n; ++j) np[static_cast<size_t>(j)] = moves[static_cast<size_t>(p[static_cast<size_t>(j)])][pick[static_cast<size_t>(j)]];
      long cfg = encode(np);
      for (const auto& [q2, c] : am) fn(cfg * Q + q2, c);
      int j = 0;
      while (j < n && ++pick[static_cast<size_t>(j)] == moves[static_cast<size_t>(p[static_cast<size_t>(j)])].size()) {
        pick[static_cast<size_t>(j)] = 0;
        ++j;
      }
      if (j == n) break;
    }
  };

  using Item = std::pair<double, long>;
  auto dijkstra = [&](long src, bool skip_src, long target, double bound, std::map<long, double>& dist) {
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    double found = std::numeric_limits<double>::infinity();
    auto relax = [&](long v, double d) {
      if (v == target && skip_src) {
        found = std::min(found, d);
        return;
      }
      auto it = dist.find(v);
      if (it == dist.end() || d < it->second) {
        dist[v] = d;
        pq.push({d, v});
      }
    };
    if (skip_src) {
      for_each_successor(src, [&](long v, Cost c) { relax(v, c.value()); });
    } else {
      dist[src] = 0;
      pq.push({0, src});
    }
    while (!pq.empty()) {
      auto [d, v] = pq.top();
      pq.pop();
      if (d > dist[v]) continue;
      if (d >= found || d >= bound) break;
      for_each_successor(v, [&](long w, Cost c) { relax(w, d + c.value()); });
    }
    return found;
  };

  std::vector<int> sp;
  for (Cell c : start) sp.push_back(id.at(c));
  long src = encode(sp) * Q + q0;
  std::map<long, double> dist;
  dijkstra(src, false, -1, std::numeric_limits<double>::infinity(), dist);

  std::vector<std::pair<double, long>> acc;
  for (const auto& [v, d] : dist)
    if (nba.is_accepting(static_cast<StateId>(v % Q))) acc.push_back({d, v});
  std::sort(acc.begin(), acc.end());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [d, x] : acc) {
    if (d >= best) break;
    std::map<long, double> cd;
    double cyc = dijkstra(x, true, x, best - d, cd);
    best = std::min(best, d + cyc);
  }
  ProductOptimum out;
  out.violation = Cost(best);
  out.nodes = static_cast<long>(dist.size());
  return out;
}

}  // namespace mvplan::oracle
