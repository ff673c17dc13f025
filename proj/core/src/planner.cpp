#include "mvplan/planner.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <string>

#include "mvplan/errors.hpp"

namespace mvplan {

namespace {

// Search cost: violation, then steps, then Manhattan distance.
struct Lex {
  Cost v;
  long steps = 0;
  long dist = 0;
  Lex& operator+=(const Lex& o) {
    v += o.v;
    steps += o.steps;
    dist += o.dist;
    return *this;
  }
  friend Lex operator+(Lex a, const Lex& b) { return a += b; }
  friend bool operator<(const Lex& a, const Lex& b) {
    if (a.v != b.v) return a.v < b.v;
    if (a.steps != b.steps) return a.steps < b.steps;
    return a.dist < b.dist;
  }
  friend bool operator>=(const Lex& a, const Lex& b) { return !(a < b); }
};

Cost times(Cost c, long n) {
  if (n <= 0 || c.is_zero()) return Cost::zero();
  if (c.is_infinite()) return c;
  return Cost(c.value() * static_cast<double>(n));
}

struct Grid {
  const WorldModel& world;
  std::vector<std::vector<int>> succ;
  explicit Grid(const WorldModel& w) : world(w), succ(static_cast<size_t>(w.cell_count())) {
    for (int i = 0; i < w.cell_count(); ++i) {
      Cell c = w.cell_at(i);
      if (!w.is_free(c)) continue;
      for (Cell n : w.successors(c)) succ[static_cast<size_t>(i)].push_back(w.index(n));
    }
  }
  int cells() const { return world.cell_count(); }
  int hop_cost(int a, int b) const { return manhattan(world.cell_at(a), world.cell_at(b)); }
};

using Mask = std::vector<char>;

// What one transition disjunct demands at its firing step.
struct FireSpec {
  bool ok = true;
  std::vector<int> target;      // cell index, -1 when the robot is not involved
  std::vector<SkillId> skill;   // applied at the firing step
  std::vector<Mask> allowed;    // cells a robot may occupy at the firing step
  Cost cost;                    // unassigned penalties
};

// One usable self-loop disjunct for waiting with every robot idle.
struct WaitOpt {
  std::vector<Mask> allowed;
  Cost per_step;
};

Mask free_mask(const Grid& g) {
  Mask m(static_cast<size_t>(g.cells()), 0);
  for (int i = 0; i < g.cells(); ++i) m[static_cast<size_t>(i)] = g.world.is_free(g.world.cell_at(i)) ? 1 : 0;
  return m;
}

FireSpec analyze_fire(const Conjunct& c, const PlanContext& ctx, const Grid& g, bool unassigned_true) {
  const int n = ctx.world.robot_count();
  FireSpec f;
  f.target.assign(static_cast<size_t>(n), -1);
  f.skill.assign(static_cast<size_t>(n), kIdle);
  std::vector<RegionId> region(static_cast<size_t>(n), -1);
  for (const Literal& l : c) {
    if (l.kind != LiteralKind::PositiveApply) continue;
    if (l.robot == kUnassigned) {
      if (!unassigned_true) f.ok = false;
      f.cost += ctx.penalties.apply(l.pred);
      continue;
    }
    const ApplyPredicate& p = ctx.preds.apply(l.pred);
    auto j = static_cast<size_t>(l.robot);
    if (l.robot >= n || !ctx.z.has(l.robot, p.skill)) {
      f.ok = false;
      continue;
    }
    if (region[j] >= 0 && (region[j] != p.region || f.skill[j] != p.skill)) {
      f.ok = false;
      continue;
    }
    region[j] = p.region;
    f.skill[j] = p.skill;
    f.target[j] = ctx.world.index(ctx.world.region(p.region).cell);
  }
  Mask base = free_mask(g);
  f.allowed.assign(static_cast<size_t>(n), base);
  for (const Literal& l : c) {
    if (l.kind == LiteralKind::NegatedApply) {
      if (l.robot < 0) continue;
      const ApplyPredicate& p = ctx.preds.apply(l.pred);
      auto j = static_cast<size_t>(l.robot);
      if (region[j] == p.region && f.skill[j] == p.skill) f.ok = false;
    } else if (l.kind == LiteralKind::Avoid) {
      const AvoidPredicate& a = ctx.preds.avoid(l.pred);
      int cell = ctx.world.index(ctx.world.region(a.region).cell);
      for (RobotId j : a.subjects) {
        if (j < 0 || j >= n) continue;
        auto ju = static_cast<size_t>(j);
        if (region[ju] >= 0 && ctx.preds.avoid_violated_by(l.pred, j, f.skill[ju], region[ju])) f.ok = false;
        if (a.skill == ctx.preds.mobility_skill()) f.allowed[ju][static_cast<size_t>(cell)] = 0;
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    auto ju = static_cast<size_t>(j);
    if (f.target[ju] < 0) continue;
    Mask only(static_cast<size_t>(g.cells()), 0);
    only[static_cast<size_t>(f.target[ju])] = 1;
    f.allowed[ju] = std::move(only);
  }
  return f;
}

std::vector<WaitOpt> analyze_wait(StateId q, const PlanContext& ctx, const Grid& g, bool unassigned_true) {
  std::vector<WaitOpt> out;
  const GuardDNF* loop = ctx.nba.self_loop(q);
  if (!loop) return out;
  const int n = ctx.world.robot_count();
  Mask base = free_mask(g);
  for (const Conjunct& c : loop->disjuncts) {
    WaitOpt w;
    w.allowed.assign(static_cast<size_t>(n), base);
    bool usable = true;
    for (const Literal& l : c) {
      if (l.kind == LiteralKind::PositiveApply) {
        // Idle robots cannot produce an assigned atom.
        if (l.robot != kUnassigned || !unassigned_true) usable = false;
        else w.per_step += ctx.penalties.apply(l.pred);
      } else if (l.kind == LiteralKind::Avoid) {
        const AvoidPredicate& a = ctx.preds.avoid(l.pred);
        if (a.skill != ctx.preds.mobility_skill()) continue;
        int cell = ctx.world.index(ctx.world.region(a.region).cell);
        for (RobotId j : a.subjects)
          if (j >= 0 && j < n) w.allowed[static_cast<size_t>(j)][static_cast<size_t>(cell)] = 0;
      }
    }
    if (usable) out.push_back(std::move(w));
  }
  std::sort(out.begin(), out.end(), [](const WaitOpt& a, const WaitOpt& b) { return a.per_step < b.per_step; });
  return out;
}

struct Phase {
  int delta = 0;
  std::vector<std::vector<int>> paths;  // per robot, cells at offsets 0..delta
  long dist = 0;
  Cost wait_cost;
};

// Robots move independently; the phase length is the first delta at which
// every robot can be at an allowed firing cell, having stayed in allowed
// waiting cells at the intermediate offsets.
std::optional<Phase> solve_phase(const Grid& g, const std::vector<int>& start, const std::vector<Mask>& fire_ok,
                                 const WaitOpt* wait, bool fresh) {
  const size_t n = start.size();
  const int lo = fresh ? 0 : 1;
  const int hi = wait ? 2 * g.cells() + 4 : lo;
  const size_t cells = static_cast<size_t>(g.cells());

  auto wait_ok = [&](size_t j, int c) { return wait->allowed[j][static_cast<size_t>(c)] != 0; };

  // Robots that can simply hold their cell throughout.
  std::vector<char> holds(n, 0);
  for (size_t j = 0; j < n; ++j) {
    int s = start[j];
    holds[j] = fire_ok[j][static_cast<size_t>(s)] && (!wait || wait_ok(j, s)) ? 1 : 0;
  }

  std::vector<std::vector<int>> layer(n);  // L_{delta-1} as a cell list
  std::vector<Mask> mark(n);
  int delta = -1;
  for (int d = lo; d <= hi; ++d) {
    bool all = true;
    bool changed = false;
    for (size_t j = 0; j < n; ++j) {
      if (holds[j] && (d == 0 || !fresh || wait_ok(j, start[j]))) continue;
      if (d == 0) {
        all = all && fire_ok[j][static_cast<size_t>(start[j])];
        continue;
      }
      if (d == 1) {
        mark[j].assign(cells, 0);
        layer[j].clear();
        if (!fresh || wait_ok(j, start[j])) {
          layer[j].push_back(start[j]);
          mark[j][static_cast<size_t>(start[j])] = 1;
        }
        changed = true;
      } else {
        std::vector<int> next;
        Mask nm(cells, 0);
        for (int c : layer[j])
          for (int s : g.succ[static_cast<size_t>(c)])
            if (!nm[static_cast<size_t>(s)] && wait_ok(j, s)) {
              nm[static_cast<size_t>(s)] = 1;
              next.push_back(s);
            }
        if (nm != mark[j]) changed = true;
        mark[j] = std::move(nm);
        layer[j] = std::move(next);
      }
      bool ok = false;
      for (int c : layer[j]) {
        for (int s : g.succ[static_cast<size_t>(c)])
          if (fire_ok[j][static_cast<size_t>(s)]) {
            ok = true;
            break;
          }
        if (ok) break;
      }
      all = all && ok;
    }
    if (all) {
      delta = d;
      break;
    }
    if (d >= 2 && !changed) break;
  }
  if (delta < 0) return std::nullopt;

  Phase ph;
  ph.delta = delta;
  ph.paths.resize(n);
  if (wait) ph.wait_cost = times(wait->per_step, delta - lo);
  constexpr int kInf = 1 << 29;
  for (size_t j = 0; j < n; ++j) {
    if (holds[j] && (delta == 0 || !fresh || wait_ok(j, start[j]))) {
      ph.paths[j].assign(static_cast<size_t>(delta) + 1, start[j]);
      continue;
    }
    // Layered DP minimizing Manhattan distance over exactly delta steps.
    std::vector<std::vector<int>> cost(static_cast<size_t>(delta) + 1, std::vector<int>(cells, kInf));
    std::vector<std::vector<int>> parent(static_cast<size_t>(delta) + 1, std::vector<int>(cells, -1));
    cost[0][static_cast<size_t>(start[j])] = 0;
    for (int t = 1; t <= delta; ++t) {
      auto& prev = cost[static_cast<size_t>(t) - 1];
      auto& cur = cost[static_cast<size_t>(t)];
      for (size_t c = 0; c < cells; ++c) {
        if (prev[c] >= kInf) continue;
        for (int s : g.succ[c]) {
          bool ok = t < delta ? wait_ok(j, s) : fire_ok[j][static_cast<size_t>(s)] != 0;
          if (!ok) continue;
          int v = prev[c] + g.hop_cost(static_cast<int>(c), s);
          if (v < cur[static_cast<size_t>(s)]) {
            cur[static_cast<size_t>(s)] = v;
            parent[static_cast<size_t>(t)][static_cast<size_t>(s)] = static_cast<int>(c);
          }
        }
      }
    }
    auto& last = cost[static_cast<size_t>(delta)];
    int best = -1;
    for (size_t c = 0; c < cells; ++c)
      if (last[c] < kInf && (best < 0 || last[c] < last[static_cast<size_t>(best)])) best = static_cast<int>(c);
    if (delta == 0) best = start[j];
    std::vector<int> path(static_cast<size_t>(delta) + 1);
    int c = best;
    for (int t = delta; t >= 0; --t) {
      path[static_cast<size_t>(t)] = c;
      if (t > 0) c = parent[static_cast<size_t>(t)][static_cast<size_t>(c)];
    }
    ph.paths[j] = std::move(path);
  }
  for (size_t j = 0; j < n; ++j)
    for (int t = 1; t <= delta; ++t)
      ph.dist += g.hop_cost(ph.paths[j][static_cast<size_t>(t) - 1], ph.paths[j][static_cast<size_t>(t)]);
  return ph;
}

// Best phase over the available waiting disjuncts.
std::optional<Phase> best_phase(const Grid& g, const std::vector<int>& start, const std::vector<Mask>& fire_ok,
                                const std::vector<WaitOpt>& waits, bool fresh) {
  std::optional<Phase> best = solve_phase(g, start, fire_ok, nullptr, fresh);
  if (best) return best;  // no waiting at all is always minimal
  for (const WaitOpt& w : waits) {
    auto p = solve_phase(g, start, fire_ok, &w, fresh);
    if (!p) continue;
    if (!best || Lex{p->wait_cost, p->delta, p->dist} < Lex{best->wait_cost, best->delta, best->dist}) best = p;
  }
  return best;
}

std::vector<HybridState> phase_states(const Phase& ph, StateId q, bool fresh, const std::vector<SkillId>& fire_skill,
                                      const Grid& g) {
  std::vector<HybridState> out;
  const size_t n = ph.paths.size();
  for (int t = fresh ? 0 : 1; t <= ph.delta; ++t) {
    HybridState h;
    h.q = q;
    h.positions.resize(n);
    h.skills.assign(n, kIdle);
    for (size_t j = 0; j < n; ++j) h.positions[j] = g.world.cell_at(ph.paths[j][static_cast<size_t>(t)]);
    if (t == ph.delta) h.skills = fire_skill;
    out.push_back(std::move(h));
  }
  return out;
}

// Cached per-search automaton analysis.
struct Analysis {
  struct Move {
    Edge e;
    int disjunct = 0;
    FireSpec fire;
  };
  std::vector<std::vector<Move>> moves;     // by source state
  std::vector<std::vector<WaitOpt>> waits;  // by state

  Analysis(const PlanContext& ctx, const Grid& g, bool unassigned_true) {
    moves.resize(static_cast<size_t>(ctx.nba.size()));
    waits.resize(static_cast<size_t>(ctx.nba.size()));
    for (StateId q = 0; q < ctx.nba.size(); ++q) waits[static_cast<size_t>(q)] = analyze_wait(q, ctx, g, unassigned_true);
    for (const auto& [e, guard] : ctx.nba.transitions())
      for (size_t d = 0; d < guard.disjuncts.size(); ++d) {
        FireSpec f = analyze_fire(guard.disjuncts[d], ctx, g, unassigned_true);
        if (!f.ok) continue;
        moves[static_cast<size_t>(e.from)].push_back({e, static_cast<int>(d), std::move(f)});
      }
  }
};

struct MacroNode {
  std::vector<int> pos;
  StateId q = 0;
  bool fresh = false;
  std::vector<int> key() const {
    std::vector<int> k = pos;
    k.push_back(q);
    k.push_back(fresh ? 1 : 0);
    return k;
  }
};

struct Record {
  MacroNode node;
  int parent = -1;
  Phase phase;
  std::vector<SkillId> fire_skill;
  StateId from_q = 0;
  bool from_fresh = false;
};

struct Expansion {
  MacroNode child;
  Lex cost;
  Phase phase;
  std::vector<SkillId> fire_skill;
};

// All macro successors of a node. `close_to` (optional) adds, for moves into
// its state, a variant pinning every robot to its positions.
std::vector<Expansion> expand(const MacroNode& n, const Analysis& an, const Grid& g, const MacroNode* close_to) {
  std::vector<Expansion> out;
  const auto& waits = an.waits[static_cast<size_t>(n.q)];
  for (const auto& mv : an.moves[static_cast<size_t>(n.q)]) {
    auto emit = [&](const std::vector<Mask>& ok) {
      auto ph = best_phase(g, n.pos, ok, waits, n.fresh);
      if (!ph) return;
      Expansion ex;
      ex.child.q = mv.e.to;
      ex.child.fresh = false;
      ex.child.pos.resize(n.pos.size());
      for (size_t j = 0; j < n.pos.size(); ++j) ex.child.pos[j] = ph->paths[j].back();
      ex.cost = Lex{mv.fire.cost + ph->wait_cost, ph->delta, ph->dist};
      ex.fire_skill = mv.fire.skill;
      ex.phase = std::move(*ph);
      out.push_back(std::move(ex));
    };
    emit(mv.fire.allowed);
    if (close_to && mv.e.to == close_to->q) {
      bool possible = true;
      std::vector<Mask> pinned(n.pos.size());
      for (size_t j = 0; j < n.pos.size() && possible; ++j) {
        int want = close_to->pos[j];
        if (!mv.fire.allowed[j][static_cast<size_t>(want)]) possible = false;
        pinned[j].assign(static_cast<size_t>(g.cells()), 0);
        pinned[j][static_cast<size_t>(want)] = 1;
      }
      if (possible && pinned != mv.fire.allowed) emit(pinned);
    }
  }
  return out;
}

struct QueueItem {
  Lex cost;
  long order = 0;
  int id = 0;
  friend bool operator>(const QueueItem& a, const QueueItem& b) {
    if (a.cost < b.cost) return false;
    if (b.cost < a.cost) return true;
    return a.order > b.order;
  }
};

using MinQueue = std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>>;

struct CycleResult {
  Lex cost;
  std::vector<Record> chain;  // phases from X back to X
};

// Cheapest macro cycle from X (non-fresh, accepting) back to X, cut off at `bound`.
std::optional<CycleResult> cycle_search(const MacroNode& x, const Analysis& an, const Grid& g, const Lex& prefix,
                                        const Lex& bound) {
  std::map<std::vector<int>, int> index;
  std::vector<Record> recs;
  std::vector<Lex> dist;
  std::vector<char> done;
  MinQueue pq;
  long order = 0;
  const auto xkey = x.key();
  index[xkey] = 0;
  recs.push_back({x, -1, {}, {}, x.q, false});
  dist.push_back(Lex{});
  done.push_back(0);

  std::optional<Lex> best;
  int best_parent = -1;
  Record best_rec;
  pq.push({Lex{}, order++, 0});
  while (!pq.empty()) {
    QueueItem it = pq.top();
    pq.pop();
    if (done[static_cast<size_t>(it.id)]) continue;
    if (it.cost < dist[static_cast<size_t>(it.id)]) continue;
    done[static_cast<size_t>(it.id)] = 1;
    if (best && it.cost >= *best) break;
    if (prefix + it.cost >= bound) break;
    MacroNode cur = recs[static_cast<size_t>(it.id)].node;
    for (Expansion& ex : expand(cur, an, g, &x)) {
      Lex c = it.cost + ex.cost;
      auto key = ex.child.key();
      if (key == xkey) {
        if (!best || c < *best) {
          best = c;
          best_parent = it.id;
          best_rec = {ex.child, it.id, ex.phase, ex.fire_skill, cur.q, cur.fresh};
        }
        continue;
      }
      auto f = index.find(key);
      if (f == index.end()) {
        int id = static_cast<int>(recs.size());
        index[key] = id;
        recs.push_back({ex.child, it.id, ex.phase, ex.fire_skill, cur.q, cur.fresh});
        dist.push_back(c);
        done.push_back(0);
        pq.push({c, order++, id});
      } else if (!done[static_cast<size_t>(f->second)] && c < dist[static_cast<size_t>(f->second)]) {
        dist[static_cast<size_t>(f->second)] = c;
        recs[static_cast<size_t>(f->second)] = {ex.child, it.id, ex.phase, ex.fire_skill, cur.q, cur.fresh};
        pq.push({c, order++, f->second});
      }
    }
  }
  if (!best || !(prefix + *best < bound)) return std::nullopt;
  CycleResult r;
  r.cost = *best;
  r.chain.push_back(best_rec);
  for (int id = best_parent; id > 0; id = recs[static_cast<size_t>(id)].parent) r.chain.push_back(recs[static_cast<size_t>(id)]);
  std::reverse(r.chain.begin(), r.chain.end());
  return r;
}

std::vector<int> to_indices(const WorldModel& w, const std::vector<Cell>& cells) {
  std::vector<int> out;
  for (Cell c : cells) {
    if (!w.is_free(c)) throw PositionOutOfBounds("start position outside free space");
    out.push_back(w.index(c));
  }
  return out;
}

}  // namespace

HybridPlan synthesize(const PlanContext& ctx, const std::vector<Cell>& start, StateId q0) {
  if (static_cast<int>(start.size()) != ctx.world.robot_count())
    throw ScenarioError("synthesize: one start cell per robot required");
  Grid g(ctx.world);
  Analysis an(ctx, g, true);
  std::vector<int> s = to_indices(ctx.world, start);

  std::map<std::vector<int>, int> index;
  std::vector<Record> recs;
  std::vector<Lex> dist;
  std::vector<char> done;
  MinQueue pq;
  long order = 0;
  std::vector<StateId> roots = q0 >= 0 ? std::vector<StateId>{q0} : ctx.nba.initial();
  for (StateId q : roots) {
    MacroNode n{s, q, true};
    index[n.key()] = static_cast<int>(recs.size());
    pq.push({Lex{}, order++, static_cast<int>(recs.size())});
    recs.push_back({n, -1, {}, {}, q, true});
    dist.push_back(Lex{});
    done.push_back(0);
  }

  Lex best{Cost::infinity(), 0, 0};
  int best_x = -1;
  CycleResult best_cycle;
  while (!pq.empty()) {
    QueueItem it = pq.top();
    pq.pop();
    if (done[static_cast<size_t>(it.id)]) continue;
    if (dist[static_cast<size_t>(it.id)] < it.cost) continue;
    done[static_cast<size_t>(it.id)] = 1;
    if (best_x >= 0 && it.cost >= best) break;
    if (it.cost.v.is_infinite()) break;
    MacroNode cur = recs[static_cast<size_t>(it.id)].node;
    if (!cur.fresh && ctx.nba.is_accepting(cur.q)) {
      Lex bound = best_x >= 0 ? best : Lex{Cost::infinity(), 0, 0};
      if (auto cyc = cycle_search(cur, an, g, it.cost, bound)) {
        best = it.cost + cyc->cost;
        best_x = it.id;
        best_cycle = std::move(*cyc);
      }
    }
    for (Expansion& ex : expand(cur, an, g, nullptr)) {
      Lex c = it.cost + ex.cost;
      auto key = ex.child.key();
      auto f = index.find(key);
      Record rec{ex.child, it.id, std::move(ex.phase), ex.fire_skill, cur.q, cur.fresh};
      if (f == index.end()) {
        int id = static_cast<int>(recs.size());
        index[key] = id;
        recs.push_back(std::move(rec));
        dist.push_back(c);
        done.push_back(0);
        pq.push({c, order++, id});
      } else if (!done[static_cast<size_t>(f->second)] && c < dist[static_cast<size_t>(f->second)]) {
        dist[static_cast<size_t>(f->second)] = c;
        recs[static_cast<size_t>(f->second)] = std::move(rec);
        pq.push({c, order++, f->second});
      }
    }
  }
  if (best_x < 0) throw Infeasible("no accepting run is realizable from the start configuration");

  std::vector<int> chain;
  for (int id = best_x; id >= 0; id = recs[static_cast<size_t>(id)].parent) chain.push_back(id);
  std::reverse(chain.begin(), chain.end());

  HybridPlan plan;
  if (chain.size() < 2) throw Infeasible("degenerate prefix");
  for (size_t i = 1; i < chain.size(); ++i) {
    const Record& r = recs[static_cast<size_t>(chain[i])];
    auto st = phase_states(r.phase, r.from_q, r.from_fresh, r.fire_skill, g);
    plan.prefix.insert(plan.prefix.end(), st.begin(), st.end());
  }
  for (const Record& r : best_cycle.chain) {
    auto st = phase_states(r.phase, r.from_q, r.from_fresh, r.fire_skill, g);
    plan.suffix.insert(plan.suffix.end(), st.begin(), st.end());
  }
  plan.violation = plan_violation(plan, 0, ctx);
  return plan;
}

Cost plan_violation(const HybridPlan& plan, size_t from_step, const PlanContext& ctx) {
  Cost total;
  for (size_t k = from_step; k < plan.length(); ++k) {
    const HybridState& h = plan.at(k);
    const GuardDNF* guard = ctx.nba.guard(h.q, plan.next_q(k));
    if (!guard) return Cost::infinity();
    Symbol s = label(h.positions, h.skills, ctx.world, ctx.z);
    total += edge_violation(s, *guard, ctx.preds, ctx.penalties);
  }
  return total;
}

std::string check_plan(const HybridPlan& plan, const PlanContext& ctx) {
  if (plan.suffix.empty()) return "empty suffix";
  if (!ctx.nba.is_accepting(plan.suffix.front().q)) return "suffix does not start in an accepting state";
  for (size_t k = 0; k < plan.length(); ++k) {
    const HybridState& h = plan.at(k);
    const HybridState& nx = k + 1 < plan.length() ? plan.at(k + 1) : plan.suffix.front();
    Symbol s;
    try {
      s = label(h.positions, h.skills, ctx.world, ctx.z);
    } catch (const Error& e) {
      return "step " + std::to_string(k) + ": " + e.what();
    }
    for (size_t j = 0; j < h.positions.size(); ++j) {
      auto succ = ctx.world.successors(h.positions[j]);
      if (std::find(succ.begin(), succ.end(), nx.positions[j]) == succ.end())
        return "step " + std::to_string(k) + ": illegal move of robot " + std::to_string(j + 1);
    }
    const GuardDNF* guard = ctx.nba.guard(h.q, nx.q);
    if (!guard) return "step " + std::to_string(k) + ": no NBA transition";
    if (!satisfies(s, *guard, ctx.preds)) return "step " + std::to_string(k) + ": symbol does not enable the transition";
  }
  return {};
}

int plan_distance(const HybridPlan& plan) {
  int d = 0;
  for (size_t k = 0; k + 1 < plan.length(); ++k)
    for (size_t j = 0; j < plan.at(k).positions.size(); ++j) d += manhattan(plan.at(k).positions[j], plan.at(k + 1).positions[j]);
  return d;
}

Segment connect(const SegmentSpec& spec, const PlanContext& ctx) {
  if (spec.corridor.empty() || spec.corridor.front() != spec.start.q)
    throw SegmentInfeasible("corridor must begin at the start state");
  if (spec.choices.size() + 1 != spec.corridor.size())
    throw SegmentInfeasible("one disjunct choice per corridor transition required");
  Grid g(ctx.world);
  const size_t n = static_cast<size_t>(ctx.world.robot_count());
  std::vector<int> pos = to_indices(ctx.world, spec.start.positions);
  bool fresh = spec.start_fresh;
  Segment seg;
  const size_t m = spec.choices.size();

  for (size_t i = 0; i < m; ++i) {
    StateId from = spec.corridor[i], to = spec.corridor[i + 1];
    const GuardDNF* guard = ctx.nba.guard(from, to);
    if (!guard || spec.choices[i] < 0 || static_cast<size_t>(spec.choices[i]) >= guard->disjuncts.size())
      throw SegmentInfeasible("corridor transition missing from the automaton");
    FireSpec fire = analyze_fire(guard->disjuncts[static_cast<size_t>(spec.choices[i])], ctx, g, spec.unassigned_true);
    if (!fire.ok) throw SegmentInfeasible("corridor disjunct cannot be produced by the team");
    std::vector<Mask> ok = fire.allowed;
    if (spec.goal_kind == GoalKind::ExactFiring && i + 1 == m) {
      for (size_t j = 0; j < n; ++j) {
        int want = ctx.world.index(spec.goal.positions[j]);
        bool allowed = ok[j][static_cast<size_t>(want)] != 0;
        ok[j].assign(static_cast<size_t>(g.cells()), 0);
        if (allowed) ok[j][static_cast<size_t>(want)] = 1;
      }
    }
    auto waits = analyze_wait(from, ctx, g, spec.unassigned_true);
    auto ph = best_phase(g, pos, ok, waits, fresh);
    if (!ph) throw SegmentInfeasible("no motion realizes corridor transition " + ctx.nba.state(from).name + " -> " +
                                     ctx.nba.state(to).name);
    auto st = phase_states(*ph, from, fresh, fire.skill, g);
    seg.states.insert(seg.states.end(), st.begin(), st.end());
    for (size_t j = 0; j < n; ++j) pos[j] = ph->paths[j].back();
    fresh = false;
  }
  seg.end_q = spec.corridor.back();

  if (spec.goal_kind == GoalKind::ExactState) {
    if (spec.goal.q != seg.end_q) throw SegmentInfeasible("goal state is not the corridor end");
    std::vector<int> want = to_indices(ctx.world, spec.goal.positions);
    if (fresh && want == pos) {
      seg.states = {spec.goal};
      seg.end_fresh = true;
      return seg;
    }
    // Final offset is the goal itself; its symbol belongs to whatever follows.
    std::vector<Mask> ok(n);
    for (size_t j = 0; j < n; ++j) {
      ok[j].assign(static_cast<size_t>(g.cells()), 0);
      ok[j][static_cast<size_t>(want[j])] = 1;
    }
    auto waits = analyze_wait(seg.end_q, ctx, g, spec.unassigned_true);
    std::optional<Phase> ph;
    if (!fresh) {
      ph = best_phase(g, pos, ok, waits, false);
    } else {
      // Fresh start away from the goal: the start itself is a waiting step.
      for (const WaitOpt& w : waits) {
        auto p = solve_phase(g, pos, ok, &w, true);
        if (p && p->delta > 0 && (!ph || Lex{p->wait_cost, p->delta, p->dist} < Lex{ph->wait_cost, ph->delta, ph->dist}))
          ph = p;
      }
    }
    if (!ph) throw SegmentInfeasible("goal configuration unreachable under the waiting constraints");
    auto st = phase_states(*ph, seg.end_q, fresh, std::vector<SkillId>(n, kIdle), g);
    st.back() = spec.goal;
    seg.states.insert(seg.states.end(), st.begin(), st.end());
    seg.end_fresh = true;
    return seg;
  }
  if (m == 0 && fresh) {
    seg.states = {spec.start};
    seg.end_fresh = true;
  }
  return seg;
}

}  // namespace mvplan
