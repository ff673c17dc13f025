#include "mvplan/automaton.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include <nlohmann/json.hpp>

#include "mvplan/errors.hpp"

namespace mvplan {

using nlohmann::json;

std::optional<StateId> Nba::find_state(const std::string& name) const {
  for (size_t q = 0; q < states_.size(); ++q)
    if (states_[q].name == name) return static_cast<StateId>(q);
  return std::nullopt;
}

std::vector<StateId> Nba::initial() const {
  std::vector<StateId> out;
  for (size_t q = 0; q < states_.size(); ++q)
    if (states_[q].initial) out.push_back(static_cast<StateId>(q));
  return out;
}

std::vector<StateId> Nba::accepting() const {
  std::vector<StateId> out;
  for (size_t q = 0; q < states_.size(); ++q)
    if (states_[q].accepting) out.push_back(static_cast<StateId>(q));
  return out;
}

const GuardDNF* Nba::guard(StateId from, StateId to) const {
  auto it = transitions_.find(Edge{from, to});
  return it == transitions_.end() ? nullptr : &it->second;
}

std::vector<StateId> Nba::successors(StateId q) const {
  std::vector<StateId> out;
  for (auto it = transitions_.lower_bound(Edge{q, 0}); it != transitions_.end() && it->first.from == q; ++it)
    if (it->first.to != q) out.push_back(it->first.to);
  return out;
}

void Nba::set_guard(Edge e, GuardDNF g) {
  if (e.from < 0 || e.from >= size() || e.to < 0 || e.to >= size())
    throw DanglingState("edge references undeclared state");
  transitions_[e] = std::move(g);
}

Nba load_nba(const json& doc, const PredicateTable& preds) {
  std::vector<NbaState> states;
  for (const json& s : doc.at("states")) {
    NbaState st;
    st.name = s.at("name").get<std::string>();
    st.initial = s.value("initial", false);
    st.accepting = s.value("accepting", false);
    states.push_back(std::move(st));
  }
  Nba nba(std::move(states));
  for (size_t a = 0; a < nba.states().size(); ++a)
    for (size_t b = a + 1; b < nba.states().size(); ++b)
      if (nba.states()[a].name == nba.states()[b].name)
        throw ScenarioError("duplicate automaton state " + nba.states()[a].name);
  if (nba.initial().empty()) throw NoInitialState("automaton declares no initial state");
  if (nba.accepting().empty()) throw NoAcceptingState("automaton declares no accepting state");

  auto resolve = [&](const json& v) {
    std::string name = v.get<std::string>();
    auto q = nba.find_state(name);
    if (!q) throw DanglingState("transition references undeclared state '" + name + "'");
    return *q;
  };
  for (const json& t : doc.value("transitions", json::array())) {
    Edge e{resolve(t.at("from")), resolve(t.at("to"))};
    GuardDNF g;
    const json& dnf = t.at("dnf");
    if (dnf.is_string()) {
      if (dnf.get<std::string>() != "true") throw ScenarioError("dnf must be 'true' or a list of conjunctions");
      g.disjuncts.push_back({});
    } else {
      if (!dnf.is_array()) throw ScenarioError("dnf must be 'true' or a list of conjunctions");
      for (const json& conj : dnf) {
        if (!conj.is_array()) throw ScenarioError("each conjunction must be a list of literals");
        Conjunct c;
        for (const json& lit : conj) c.push_back(parse_literal(lit.get<std::string>(), preds));
        normalize(c);
        g.disjuncts.push_back(std::move(c));
      }
    }
    if (const GuardDNF* prev = nba.guard(e.from, e.to)) {
      GuardDNF merged = *prev;
      merged.disjuncts.insert(merged.disjuncts.end(), g.disjuncts.begin(), g.disjuncts.end());
      g = std::move(merged);
    }
    nba.set_guard(e, std::move(g));
  }
  return nba;
}

json dump_nba(const Nba& nba, const PredicateTable& preds) {
  json states = json::array();
  for (const NbaState& s : nba.states())
    states.push_back({{"name", s.name}, {"initial", s.initial}, {"accepting", s.accepting}});
  json trans = json::array();
  for (const auto& [e, g] : nba.transitions()) {
    json dnf = json::array();
    for (const Conjunct& c : g.disjuncts) {
      json conj = json::array();
      for (const Literal& l : c) conj.push_back(literal_text(l, preds));
      dnf.push_back(conj);
    }
    trans.push_back({{"from", nba.state(e.from).name}, {"to", nba.state(e.to).name}, {"dnf", dnf}});
  }
  return {{"states", states}, {"transitions", trans}};
}

Nba prune(const Nba& nba) {
  Nba out(nba.states());
  for (const auto& [e, g] : nba.transitions()) {
    GuardDNF kept;
    for (const Conjunct& c : g.disjuncts)
      if (!conjunct_overloads_robot(c)) kept.disjuncts.push_back(c);
    if (!kept.disjuncts.empty()) out.set_guard(e, std::move(kept));
  }
  return out;
}

std::vector<SelfLoopIssue> loose_self_loops(const Nba& nba) {
  std::vector<SelfLoopIssue> issues;
  for (StateId q = 0; q < nba.size(); ++q) {
    const GuardDNF* g = nba.self_loop(q);
    if (!g || g->is_true()) continue;
    for (const Conjunct& c : g->disjuncts) {
      auto bad = std::find_if(c.begin(), c.end(), [](const Literal& l) { return l.kind != LiteralKind::Avoid; });
      if (bad != c.end()) {
        issues.push_back({q, "self-loop of " + nba.state(q).name + " carries an apply literal"});
        break;
      }
    }
  }
  return issues;
}

std::set<StateId> reachable_from(const Nba& nba, StateId q_cur) {
  std::set<StateId> seen{q_cur};
  std::deque<StateId> todo{q_cur};
  while (!todo.empty()) {
    StateId q = todo.front();
    todo.pop_front();
    for (StateId n : nba.successors(q))
      if (seen.insert(n).second) todo.push_back(n);
  }
  return seen;
}

FailedEdgeSet failed_edges(const Nba& nba, StateId q_cur, PredId pi) {
  FailedEdgeSet out{pi, {}};
  std::set<StateId> reach = reachable_from(nba, q_cur);
  for (const auto& [e, g] : nba.transitions())
    if (reach.count(e.from) && reach.count(e.to) && g.mentions(pi)) out.edges.push_back(e);
  return out;
}

std::vector<AssignedTask> assigned_tasks(const Nba& nba, const PredicateTable& preds, StateId q_cur) {
  std::set<StateId> reach;
  if (q_cur >= 0) reach = reachable_from(nba, q_cur);
  std::set<std::pair<PredId, RobotId>> seen;
  std::vector<AssignedTask> out;
  for (const auto& [e, g] : nba.transitions()) {
    if (q_cur >= 0 && (!reach.count(e.from) || !reach.count(e.to))) continue;
    for (const Conjunct& c : g.disjuncts)
      for (const Literal& l : c)
        if (l.kind == LiteralKind::PositiveApply && l.robot != kUnassigned && seen.insert({l.pred, l.robot}).second)
          out.push_back({l.pred, l.robot, preds.apply(l.pred).skill});
  }
  std::sort(out.begin(), out.end(), [](const AssignedTask& a, const AssignedTask& b) {
    return std::tie(a.predicate, a.robot) < std::tie(b.predicate, b.robot);
  });
  return out;
}

UnassignedMap unassigned_map(const Nba& nba) {
  UnassignedMap out;
  for (const auto& [e, g] : nba.transitions())
    for (size_t d = 0; d < g.disjuncts.size(); ++d) {
      std::vector<PredId> u;
      for (const Literal& l : g.disjuncts[d])
        if (l.kind == LiteralKind::PositiveApply && l.robot == kUnassigned) u.push_back(l.pred);
      if (!u.empty()) out[{e, static_cast<int>(d)}] = std::move(u);
    }
  return out;
}

Cost transition_cost(const UnassignedMap& u, Edge e, int d, const PenaltyMap& f) {
  auto it = u.find({e, d});
  Cost c;
  if (it != u.end())
    for (PredId p : it->second) c += f.apply(p);
  return c;
}

std::vector<StateId> StatePath::prefix() const {
  return {path.begin(), path.begin() + split};
}

std::vector<StateId> StatePath::suffix() const {
  return {path.begin() + (split - 1), path.end()};
}

std::vector<StatePath> enumerate_paths(const Nba& nba, StateId q_cur, const UnassignedMap& unassigned,
                                     const PenaltyMap& f, size_t cap) {
  // Simple prefix paths q_cur -> accepting.
  std::vector<std::vector<StateId>> prefixes;
  std::vector<StateId> stack{q_cur};
  std::vector<char> on(static_cast<size_t>(nba.size()), 0);
  on[static_cast<size_t>(q_cur)] = 1;
  std::function<void()> dfs_pre = [&] {
    StateId q = stack.back();
    if (nba.is_accepting(q)) prefixes.push_back(stack);
    for (StateId n : nba.successors(q)) {
      if (on[static_cast<size_t>(n)]) continue;
      on[static_cast<size_t>(n)] = 1;
      stack.push_back(n);
      dfs_pre();
      stack.pop_back();
      on[static_cast<size_t>(n)] = 0;
    }
  };
  dfs_pre();

  // Simple cycles through each accepting state, self-loop as {acc, acc}.
  std::map<StateId, std::vector<std::vector<StateId>>> cycles;
  for (StateId acc : nba.accepting()) {
    auto& out = cycles[acc];
    if (nba.self_loop(acc)) out.push_back({acc, acc});
    std::vector<StateId> cyc{acc};
    std::vector<char> used(static_cast<size_t>(nba.size()), 0);
    used[static_cast<size_t>(acc)] = 1;
    std::function<void()> dfs_cyc = [&] {
      StateId q = cyc.back();
      for (StateId n : nba.successors(q)) {
        if (n == acc) {
          cyc.push_back(acc);
          out.push_back(cyc);
          cyc.pop_back();
          continue;
        }
        if (used[static_cast<size_t>(n)]) continue;
        used[static_cast<size_t>(n)] = 1;
        cyc.push_back(n);
        dfs_cyc();
        cyc.pop_back();
        used[static_cast<size_t>(n)] = 0;
      }
    };
    dfs_cyc();
  }

  std::vector<StatePath> out;
  for (const auto& pre : prefixes) {
    StateId acc = pre.back();
    for (const auto& cyc : cycles[acc]) {
      StatePath base;
      base.path = pre;
      base.path.insert(base.path.end(), cyc.begin() + 1, cyc.end());
      base.split = static_cast<int>(pre.size());
      int edges = base.edge_count();
      std::vector<int> width(static_cast<size_t>(edges));
      for (int m = 0; m < edges; ++m)
        width[static_cast<size_t>(m)] = static_cast<int>(nba.guard(base.path[m], base.path[m + 1])->disjuncts.size());
      // Odometer over disjunct choices.
      std::vector<int> choice(static_cast<size_t>(edges), 0);
      while (true) {
        if (out.size() >= cap) throw TooLarge("enumerate_paths exceeded cap of " + std::to_string(cap));
        StatePath s = base;
        s.choices = choice;
        for (int m = 0; m < edges; ++m) s.cost += transition_cost(unassigned, s.edge(m), choice[static_cast<size_t>(m)], f);
        out.push_back(std::move(s));
        int m = edges - 1;
        while (m >= 0 && ++choice[static_cast<size_t>(m)] == width[static_cast<size_t>(m)]) {
          choice[static_cast<size_t>(m)] = 0;
          --m;
        }
        if (m < 0) break;
      }
    }
  }
  if (out.empty()) throw NoAcceptingPath("no accepting lasso reachable from " + nba.state(q_cur).name);
  std::sort(out.begin(), out.end(), [](const StatePath& a, const StatePath& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.path != b.path) return a.path < b.path;
    if (a.split != b.split) return a.split < b.split;
    return a.choices < b.choices;
  });
  return out;
}

}  // namespace mvplan
