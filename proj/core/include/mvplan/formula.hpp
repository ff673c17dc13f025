#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "mvplan/cost.hpp"
#include "mvplan/world.hpp"

namespace mvplan {

using PredId = int;

inline constexpr RobotId kUnassigned = -1;
inline constexpr RobotId kAllRobots = -2;

// "Robot `robot` applies `skill` at `region`". The robot here is the initial
// assignment; guards carry their own (possibly reassigned) robot per literal.
struct ApplyPredicate {
  std::string name;
  SkillId skill = 1;
  RobotId robot = 0;
  RegionId region = 0;
};

// "Members of the scope team (or one subject) do not apply `skill` at `region`".
// `subjects` is the resolved robot set the restriction binds.
struct AvoidPredicate {
  std::string name;
  SkillId scope_skill = 1;
  RobotId subject = kAllRobots;
  SkillId skill = 1;
  RegionId region = 0;
  std::vector<RobotId> subjects;
};

class PredicateTable {
 public:
  PredicateTable() = default;
  explicit PredicateTable(SkillId mobility) : mobility_(mobility) {}

  PredId add_apply(ApplyPredicate p);
  PredId add_avoid(AvoidPredicate p);

  const ApplyPredicate& apply(PredId id) const { return apply_.at(static_cast<size_t>(id)); }
  const AvoidPredicate& avoid(PredId id) const { return avoid_.at(static_cast<size_t>(id)); }
  int apply_count() const { return static_cast<int>(apply_.size()); }
  int avoid_count() const { return static_cast<int>(avoid_.size()); }
  // -1 when absent.
  PredId find_apply(const std::string& name) const;
  PredId find_avoid(const std::string& name) const;
  SkillId mobility_skill() const { return mobility_; }

  // Does robot `j` applying `skill` at `region` (with presence at the region)
  // break avoid predicate `a`? skill == kIdle means bare presence.
  bool avoid_violated_by(PredId a, RobotId j, SkillId skill, RegionId region) const;

 private:
  SkillId mobility_ = 1;
  std::vector<ApplyPredicate> apply_;
  std::vector<AvoidPredicate> avoid_;
  std::map<std::string, PredId> apply_index_;
  std::map<std::string, PredId> avoid_index_;
};

// Def. 1: finite positive penalties on apply predicates; avoid predicates are
// implicitly infinite.
class PenaltyMap {
 public:
  PenaltyMap() = default;
  explicit PenaltyMap(std::vector<double> apply_penalties);

  Cost apply(PredId id) const;
  static Cost avoid() { return Cost::infinity(); }
  int size() const { return static_cast<int>(f_.size()); }

 private:
  std::vector<double> f_;
};

enum class LiteralKind { PositiveApply = 0, NegatedApply = 1, Avoid = 2 };

struct Literal {
  LiteralKind kind = LiteralKind::PositiveApply;
  PredId pred = 0;
  // For apply literals: robot bound to this occurrence (kUnassigned allowed for
  // positive literals after a sacrifice). Unused for avoid literals.
  RobotId robot = kUnassigned;

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

using Conjunct = std::vector<Literal>;

struct GuardDNF {
  std::vector<Conjunct> disjuncts;

  bool is_true() const;  // some disjunct is the empty conjunction
  bool mentions(PredId apply_pred) const;
  friend bool operator==(const GuardDNF&, const GuardDNF&) = default;
};

// Sorts literals and drops duplicates so equal conjunctions compare equal.
void normalize(Conjunct& c);

struct Atom {
  RobotId robot = 0;
  SkillId skill = 0;
  RegionId region = 0;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct Presence {
  RobotId robot = 0;
  RegionId region = 0;
  friend auto operator<=>(const Presence&, const Presence&) = default;
};

// Label of a team configuration. `atoms` are the applied skills; `presence` records which
// robots stand on region cells (needed by the mobility presence rule).
struct Symbol {
  std::vector<Atom> atoms;
  std::vector<Presence> presence;

  bool empty() const { return atoms.empty(); }
  bool has_atom(RobotId j, SkillId c, RegionId r) const;
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

Symbol label(const std::vector<Cell>& positions, const std::vector<SkillId>& skills, const WorldModel& world,
             const CapabilityMatrix& z);

// Does the symbol break this avoid literal? Mobility avoids are broken by
// presence alone; other skills only by applying that skill at the region.
bool avoid_violated(const Symbol& s, const AvoidPredicate& a, SkillId mobility);

// Unassigned positive literals count as true.
bool satisfies(const Symbol& s, const Conjunct& c, const PredicateTable& preds);
bool satisfies(const Symbol& s, const GuardDNF& g, const PredicateTable& preds);

// Minimum-penalty completion of a single conjunct; infinite if impossible.
// Several literals naming one atom are paid for once, at the cheapest penalty.
Cost completion_cost(const Symbol& s, const Conjunct& c, const PredicateTable& preds, const PenaltyMap& f);

// Cheapest set of predicates to pretend true so the symbol satisfies the
// guard; the cost is the sum of their penalties.
Cost edge_violation(const Symbol& s, const GuardDNF& g, const PredicateTable& preds, const PenaltyMap& f);

// Sum of penalties of unassigned positive literals in a conjunct.
Cost unassigned_cost(const Conjunct& c, const PenaltyMap& f);

// Robot required by two distinct positive literals in one conjunct.
bool conjunct_overloads_robot(const Conjunct& c);

// Scenario-file literal syntax: "pi:<name>", "!pi:<name>", "npi:<name>".
Literal parse_literal(const std::string& text, const PredicateTable& preds);
std::string literal_text(const Literal& l, const PredicateTable& preds);

}  // namespace mvplan
