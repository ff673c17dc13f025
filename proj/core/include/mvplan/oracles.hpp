#pragma once

// Brute-force references. Deliberately naive and kept apart from the
// planner/reallocation code paths; only domain types are shared.

#include <utility>
#include <vector>

#include "mvplan/automaton.hpp"
#include "mvplan/formula.hpp"
#include "mvplan/reallocation.hpp"
#include "mvplan/world.hpp"

namespace mvplan::oracle {

// Minimum over every set of pretended-true atoms. Throws TooLarge above 12
// free variables.
Cost brute_edge_violation(const Symbol& s, const GuardDNF& g, const PredicateTable& preds, const PenaltyMap& f);

struct ReassignOptimum {
  Cost cost;
  int hops = 0;
};

// Every simple path of the reassignment graph (root may close the path).
// Throws TooLarge above 8 robots.
ReassignOptimum brute_reassign(const AssignmentContext& ctx, const PredicateTable& preds, const Teams& teams,
                               const PenaltyMap& f);

struct HungarianResult {
  Cost violation;
  int reassigned = 0;
  std::vector<RobotId> robot_of_task;  // -1 when the task is left unassigned
  std::vector<PredId> tasks;
};

// Assigns every positive assigned literal of the conjunct (including the
// broken one held by `failed_robot`) from scratch.
HungarianResult hungarian_reassign(const Conjunct& c, PredId failed, RobotId failed_robot, const PredicateTable& preds,
                                   const CapabilityMatrix& z, const PenaltyMap& f);

// Square min-cost assignment; returns column per row.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost);

struct ProductOptimum {
  Cost violation;
  long nodes = 0;
};

// Exhaustive Dijkstra over (team positions, NBA state) with every skill
// choice; unassigned predicates count as true at their penalty. Throws
// TooLarge beyond 10^6 product states.
ProductOptimum brute_product_plan(const Nba& nba, const PredicateTable& preds, const PenaltyMap& f,
                                  const WorldModel& world, const CapabilityMatrix& z, const std::vector<Cell>& start,
                                  StateId q0);

}  // namespace mvplan::oracle
