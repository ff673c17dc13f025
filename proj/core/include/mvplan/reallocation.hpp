#pragma once

#include <set>
#include <vector>

#include "mvplan/automaton.hpp"
#include "mvplan/formula.hpp"
#include "mvplan/world.hpp"

namespace mvplan {

inline constexpr SkillId kAnySkill = -1;

// Something a robot could produce that falsifies the conjunct: applying
// `skill` at `region` (kAnySkill: merely being there).
struct Fragment {
  SkillId skill = kAnySkill;
  RegionId region = 0;
  friend auto operator<=>(const Fragment&, const Fragment&) = default;
};

struct AssignmentContext {
  std::set<RobotId> robots_in_formula;
  std::vector<PredId> busy;                    // g: -1 when free
  std::vector<std::set<Fragment>> forbidden;   // V
  std::set<RobotId> free;                      // A
  RobotId root = 0;                            // robot that lost the failed predicate
  PredId failed = 0;

  // g(a) not in V(a'): may robot `to` take over predicate `pred`?
  bool may_take(RobotId to, PredId pred, const PredicateTable& preds) const;
};

// Builds g, V, R and A for one conjunct. `robot` is the robot whose
// occurrence of `failed` broke. Throws FailedPredicateAbsent.
AssignmentContext build_context(const Conjunct& c, const PredicateTable& preds, int robot_count, PredId failed,
                                RobotId robot);

struct ReassignPath {
  std::vector<RobotId> robots;  // p(0) = root ... p(P)
  PredId sacrificed = -1;
  Cost cost;
  int hops() const { return static_cast<int>(robots.size()) - 1; }
};

// Breadth-first search over the reassignment graph. Throws NoCandidate when
// nobody holds the failed skill.
ReassignPath bfs_reassign(const AssignmentContext& ctx, const PredicateTable& preds, const Teams& teams,
                          const PenaltyMap& f);

struct ReassignmentRecord {
  int time = 0;
  PredId predicate = 0;
  Edge edge;
  int disjunct = 0;
  std::vector<RobotId> path;
  PredId sacrificed = -1;
  Cost cost;
};

struct RepairResult {
  Nba nba;
  std::vector<Edge> edges;  // every edge touched, sorted, unique
  std::vector<ReassignmentRecord> log;
};

// Each failed predicate independently, each edge it appears on in
// turn, each disjunct holding a broken occurrence. `z` is post-failure.
RepairResult repair(const Nba& nba, StateId q_cur, const std::vector<PredId>& failed, const PredicateTable& preds,
                    const CapabilityMatrix& z, const PenaltyMap& f);

// Predicates whose positive occurrence on an edge reachable from q_cur names a
// robot that lost the skill.
std::vector<PredId> broken_predicates(const Nba& nba, StateId q_cur, const PredicateTable& preds,
                                      const CapabilityMatrix& z);

}  // namespace mvplan
