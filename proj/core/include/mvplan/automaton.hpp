#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mvplan/formula.hpp"

namespace mvplan {

using StateId = int;

struct NbaState {
  std::string name;
  bool initial = false;
  bool accepting = false;
  friend bool operator==(const NbaState&, const NbaState&) = default;
};

struct Edge {
  StateId from = 0;
  StateId to = 0;
  bool is_self_loop() const { return from == to; }
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class Nba {
 public:
  Nba() = default;
  explicit Nba(std::vector<NbaState> states) : states_(std::move(states)) {}

  int size() const { return static_cast<int>(states_.size()); }
  const NbaState& state(StateId q) const { return states_.at(static_cast<size_t>(q)); }
  const std::vector<NbaState>& states() const { return states_; }
  std::optional<StateId> find_state(const std::string& name) const;
  std::vector<StateId> initial() const;
  std::vector<StateId> accepting() const;
  bool is_accepting(StateId q) const { return state(q).accepting; }

  const std::map<Edge, GuardDNF>& transitions() const { return transitions_; }
  const GuardDNF* guard(StateId from, StateId to) const;
  const GuardDNF* self_loop(StateId q) const { return guard(q, q); }
  // Successor states (excluding q itself), ascending.
  std::vector<StateId> successors(StateId q) const;

  void set_guard(Edge e, GuardDNF g);
  void erase(Edge e) { transitions_.erase(e); }

  friend bool operator==(const Nba&, const Nba&) = default;

 private:
  std::vector<NbaState> states_;
  std::map<Edge, GuardDNF> transitions_;
};

// Parses the automaton section of a scenario file.
Nba load_nba(const nlohmann::json& doc, const PredicateTable& preds);
nlohmann::json dump_nba(const Nba& nba, const PredicateTable& preds);

// Drops conjuncts demanding two distinct apply predicates of one robot; guards
// left empty remove the transition.
Nba prune(const Nba& nba);

struct SelfLoopIssue {
  StateId state = 0;
  std::string reason;
};

// Self-loops that are neither constant true nor built only from avoid literals.
std::vector<SelfLoopIssue> loose_self_loops(const Nba& nba);

std::set<StateId> reachable_from(const Nba& nba, StateId q_cur);

struct FailedEdgeSet {
  PredId predicate = 0;
  std::vector<Edge> edges;  // sorted by (from, to)
};

FailedEdgeSet failed_edges(const Nba& nba, StateId q_cur, PredId pi);

// Positive literal occurrences with a robot bound, restricted to edges inside
// the reachable set of q_cur (all edges when q_cur is negative).
std::vector<AssignedTask> assigned_tasks(const Nba& nba, const PredicateTable& preds, StateId q_cur = -1);

// (edge, disjunct index) -> apply predicates with no robot.
using UnassignedMap = std::map<std::pair<Edge, int>, std::vector<PredId>>;

UnassignedMap unassigned_map(const Nba& nba);

// Cost of taking disjunct d on edge e given the unassigned sets.
Cost transition_cost(const UnassignedMap& u, Edge e, int d, const PenaltyMap& f);

struct StatePath {
  // Prefix states followed by the suffix cycle without its repeated head:
  // path[split-1] is the accepting state the suffix starts and ends at.
  std::vector<StateId> path;
  int split = 0;
  std::vector<int> choices;  // one disjunct index per consecutive pair
  Cost cost;

  std::vector<StateId> prefix() const;
  // Includes both ends, e.g. {acc, acc} for a self-loop-only suffix.
  std::vector<StateId> suffix() const;
  int edge_count() const { return static_cast<int>(path.size()) - 1; }
  Edge edge(int m) const { return {path[static_cast<size_t>(m)], path[static_cast<size_t>(m) + 1]}; }
};

// Sorted by cost, then lexicographically by (path, choices). Throws
// NoAcceptingPath when no accepting lasso is reachable; TooLarge past `cap`.
std::vector<StatePath> enumerate_paths(const Nba& nba, StateId q_cur, const UnassignedMap& unassigned,
                                     const PenaltyMap& f, size_t cap = 2'000'000);

}  // namespace mvplan
