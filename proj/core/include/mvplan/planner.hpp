#pragma once

#include <optional>
#include <vector>

#include "mvplan/automaton.hpp"
#include "mvplan/formula.hpp"
#include "mvplan/world.hpp"

namespace mvplan {

struct HybridState {
  std::vector<Cell> positions;
  std::vector<SkillId> skills;
  StateId q = 0;
  friend bool operator==(const HybridState&, const HybridState&) = default;
};

// Lasso plan: prefix once, then suffix forever. The state after
// suffix.back() is suffix.front() again.
struct HybridPlan {
  std::vector<HybridState> prefix;
  std::vector<HybridState> suffix;
  Cost violation;

  size_t length() const { return prefix.size() + suffix.size(); }
  // Step k of prefix followed by one suffix pass.
  const HybridState& at(size_t k) const { return k < prefix.size() ? prefix[k] : suffix[k - prefix.size()]; }
  // NBA state entered after step k (wraps to the suffix head).
  StateId next_q(size_t k) const { return k + 1 < length() ? at(k + 1).q : suffix.front().q; }
};

// Everything a planning call reads. References must outlive the call.
struct PlanContext {
  const Nba& nba;
  const PredicateTable& preds;
  const PenaltyMap& penalties;
  const WorldModel& world;
  const CapabilityMatrix& z;
};

// Optimal lasso from `start` (symbol at the start not yet emitted). Minimizes
// (violation, steps, Manhattan distance); unassigned predicates count as true
// at their penalty, avoid literals are never violated. When `q0` is negative
// every initial NBA state is tried. Throws Infeasible.
HybridPlan synthesize(const PlanContext& ctx, const std::vector<Cell>& start, StateId q0 = -1);

// Sum of edge_violation over steps from_step .. length()-1 (one suffix pass).
Cost plan_violation(const HybridPlan& plan, size_t from_step, const PlanContext& ctx);

// Empty string when the plan is legal: primitives legal, skills possessed,
// every step enabled under unassigned-as-true, suffix closes, accepting head.
std::string check_plan(const HybridPlan& plan, const PlanContext& ctx);

enum class GoalKind {
  // End on this exact hybrid state (its skills are kept as given).
  ExactState,
  // Last corridor transition must fire with robots exactly at goal positions.
  ExactFiring,
  // Any state once the last corridor state is entered.
  ReachState,
};

struct SegmentSpec {
  HybridState start;
  // false: the start state's symbol was already emitted (it fired a transition
  // into start.q) so the segment continues one step later.
  bool start_fresh = true;
  GoalKind goal_kind = GoalKind::ReachState;
  HybridState goal;
  // NBA states to visit in order, beginning with start.q.
  std::vector<StateId> corridor;
  // Disjunct per corridor transition.
  std::vector<int> choices;
  bool unassigned_true = true;
};

struct Segment {
  // For a fresh start the first element is the start state with its chosen
  // skills; otherwise the first element is one step after the start.
  std::vector<HybridState> states;
  // Whether the last state's symbol is still open (ExactState goals).
  bool end_fresh = false;
  StateId end_q = 0;
};

// Shortest corridor-following segment. Throws SegmentInfeasible.
Segment connect(const SegmentSpec& spec, const PlanContext& ctx);

// Plans built by synthesize put skills only on firing steps; this is the hop
// cost used as a tie-breaker.
int plan_distance(const HybridPlan& plan);

}  // namespace mvplan
