#include "mvplan/formula.hpp"

#include <map>
#include <set>

#include <algorithm>
#include <string>

#include "mvplan/errors.hpp"

namespace mvplan {

PredId PredicateTable::add_apply(ApplyPredicate p) {
  if (p.skill == kIdle) throw ScenarioError("apply predicate " + p.name + " uses the idle skill");
  if (apply_index_.count(p.name) || avoid_index_.count(p.name))
    throw ScenarioError("duplicate predicate name " + p.name);
  PredId id = static_cast<PredId>(apply_.size());
  apply_index_[p.name] = id;
  apply_.push_back(std::move(p));
  return id;
}

PredId PredicateTable::add_avoid(AvoidPredicate p) {
  if (apply_index_.count(p.name) || avoid_index_.count(p.name))
    throw ScenarioError("duplicate predicate name " + p.name);
  std::sort(p.subjects.begin(), p.subjects.end());
  PredId id = static_cast<PredId>(avoid_.size());
  avoid_index_[p.name] = id;
  avoid_.push_back(std::move(p));
  return id;
}

PredId PredicateTable::find_apply(const std::string& name) const {
  auto it = apply_index_.find(name);
  return it == apply_index_.end() ? -1 : it->second;
}

PredId PredicateTable::find_avoid(const std::string& name) const {
  auto it = avoid_index_.find(name);
  return it == avoid_index_.end() ? -1 : it->second;
}

bool PredicateTable::avoid_violated_by(PredId a, RobotId j, SkillId skill, RegionId region) const {
  const AvoidPredicate& av = avoid(a);
  if (av.region != region) return false;
  if (!std::binary_search(av.subjects.begin(), av.subjects.end(), j)) return false;
  if (av.skill == mobility_) return true;
  return skill == av.skill;
}

PenaltyMap::PenaltyMap(std::vector<double> apply_penalties) : f_(std::move(apply_penalties)) {
  for (size_t i = 0; i < f_.size(); ++i)
    if (!(f_[i] > 0.0) || f_[i] == Cost::infinity().value())
      throw ScenarioError("penalty of apply predicate #" + std::to_string(i) + " must be positive and finite");
}

Cost PenaltyMap::apply(PredId id) const { return Cost(f_.at(static_cast<size_t>(id))); }

bool GuardDNF::is_true() const {
  return std::any_of(disjuncts.begin(), disjuncts.end(), [](const Conjunct& c) { return c.empty(); });
}

bool GuardDNF::mentions(PredId apply_pred) const {
  for (const Conjunct& c : disjuncts)
    for (const Literal& l : c)
      if (l.kind != LiteralKind::Avoid && l.pred == apply_pred) return true;
  return false;
}

void normalize(Conjunct& c) {
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
}

bool Symbol::has_atom(RobotId j, SkillId c, RegionId r) const {
  return std::find(atoms.begin(), atoms.end(), Atom{j, c, r}) != atoms.end();
}

Symbol label(const std::vector<Cell>& positions, const std::vector<SkillId>& skills, const WorldModel& world,
             const CapabilityMatrix& z) {
  if (positions.size() != skills.size() || static_cast<int>(positions.size()) != world.robot_count())
    throw ScenarioError("label: position/skill vectors must have one entry per robot");
  Symbol s;
  for (size_t j = 0; j < positions.size(); ++j) {
    RobotId r = static_cast<RobotId>(j);
    if (!world.is_free(positions[j]))
      throw PositionOutOfBounds("robot " + std::to_string(r + 1) + " is outside free space");
    if (skills[j] != kIdle && !z.has(r, skills[j]))
      throw SkillNotPossessed("robot " + std::to_string(r + 1) + " lacks skill " + std::to_string(skills[j]));
    auto reg = world.region_at(positions[j]);
    if (!reg) continue;
    s.presence.push_back({r, *reg});
    if (skills[j] != kIdle) s.atoms.push_back({r, skills[j], *reg});
  }
  return s;
}

bool avoid_violated(const Symbol& s, const AvoidPredicate& a, SkillId mobility) {
  for (RobotId j : a.subjects) {
    if (a.skill == mobility) {
      for (const Presence& p : s.presence)
        if (p.robot == j && p.region == a.region) return true;
      for (const Atom& at : s.atoms)
        if (at.robot == j && at.region == a.region) return true;
    } else if (s.has_atom(j, a.skill, a.region)) {
      return true;
    }
  }
  return false;
}

namespace {

bool literal_holds(const Symbol& s, const Literal& l, const PredicateTable& preds) {
  switch (l.kind) {
    case LiteralKind::PositiveApply: {
      if (l.robot == kUnassigned) return true;
      const ApplyPredicate& p = preds.apply(l.pred);
      return s.has_atom(l.robot, p.skill, p.region);
    }
    case LiteralKind::NegatedApply: {
      if (l.robot == kUnassigned) return true;
      const ApplyPredicate& p = preds.apply(l.pred);
      return !s.has_atom(l.robot, p.skill, p.region);
    }
    case LiteralKind::Avoid:
      return !avoid_violated(s, preds.avoid(l.pred), preds.mobility_skill());
  }
  return false;
}

}  // namespace

bool satisfies(const Symbol& s, const Conjunct& c, const PredicateTable& preds) {
  return std::all_of(c.begin(), c.end(), [&](const Literal& l) { return literal_holds(s, l, preds); });
}

bool satisfies(const Symbol& s, const GuardDNF& g, const PredicateTable& preds) {
  return std::any_of(g.disjuncts.begin(), g.disjuncts.end(),
                     [&](const Conjunct& c) { return satisfies(s, c, preds); });
}

namespace {

// Cheapest predicate naming each atom; pretending that predicate makes the
// atom, and so every literal on it, true.
using AtomPrice = std::map<Atom, Cost>;

void add_prices(const Conjunct& c, const PredicateTable& preds, const PenaltyMap& f, AtomPrice& out) {
  for (const Literal& l : c) {
    if (l.kind != LiteralKind::PositiveApply || l.robot == kUnassigned) continue;
    const ApplyPredicate& p = preds.apply(l.pred);
    Atom a{l.robot, p.skill, p.region};
    auto it = out.find(a);
    if (it == out.end() || f.apply(l.pred) < it->second) out[a] = f.apply(l.pred);
  }
}

Cost priced_completion(const Symbol& s, const Conjunct& c, const PredicateTable& preds, const PenaltyMap& f,
                       const AtomPrice& price) {
  Cost total;
  std::set<Atom> charged;
  for (const Literal& l : c) {
    if (l.kind != LiteralKind::PositiveApply) {
      if (!literal_holds(s, l, preds)) return Cost::infinity();
      continue;
    }
    if (l.robot == kUnassigned) {
      total += f.apply(l.pred);
      continue;
    }
    const ApplyPredicate& p = preds.apply(l.pred);
    Atom a{l.robot, p.skill, p.region};
    if (s.has_atom(a.robot, a.skill, a.region) || !charged.insert(a).second) continue;
    // Pretending this atom true must not contradict the conjunct's own
    // negative requirements.
    for (const Literal& other : c) {
      if (other.kind == LiteralKind::NegatedApply && other.robot == l.robot) {
        const ApplyPredicate& q = preds.apply(other.pred);
        if (q.skill == p.skill && q.region == p.region) return Cost::infinity();
      }
      if (other.kind == LiteralKind::Avoid && preds.avoid_violated_by(other.pred, l.robot, p.skill, p.region))
        return Cost::infinity();
    }
    total += price.at(a);
  }
  return total;
}

}  // namespace

Cost completion_cost(const Symbol& s, const Conjunct& c, const PredicateTable& preds, const PenaltyMap& f) {
  AtomPrice price;
  add_prices(c, preds, f, price);
  return priced_completion(s, c, preds, f, price);
}

Cost edge_violation(const Symbol& s, const GuardDNF& g, const PredicateTable& preds, const PenaltyMap& f) {
  AtomPrice price;
  for (const Conjunct& c : g.disjuncts) add_prices(c, preds, f, price);
  Cost best = Cost::infinity();
  for (const Conjunct& c : g.disjuncts) {
    Cost v = priced_completion(s, c, preds, f, price);
    if (v < best) best = v;
    if (best.is_zero()) break;
  }
  return best;
}

Cost unassigned_cost(const Conjunct& c, const PenaltyMap& f) {
  Cost total;
  for (const Literal& l : c)
    if (l.kind == LiteralKind::PositiveApply && l.robot == kUnassigned) total += f.apply(l.pred);
  return total;
}

bool conjunct_overloads_robot(const Conjunct& c) {
  for (size_t i = 0; i < c.size(); ++i) {
    if (c[i].kind != LiteralKind::PositiveApply || c[i].robot == kUnassigned) continue;
    for (size_t k = i + 1; k < c.size(); ++k)
      if (c[k].kind == LiteralKind::PositiveApply && c[k].robot == c[i].robot && c[k].pred != c[i].pred)
        return true;
  }
  return false;
}

Literal parse_literal(const std::string& text, const PredicateTable& preds) {
  auto lookup_apply = [&](const std::string& name) {
    PredId id = preds.find_apply(name);
    if (id < 0) throw UnknownPredicate("unknown apply predicate '" + name + "'");
    return id;
  };
  if (text.rfind("!pi:", 0) == 0) {
    PredId id = lookup_apply(text.substr(4));
    return {LiteralKind::NegatedApply, id, preds.apply(id).robot};
  }
  if (text.rfind("pi:", 0) == 0) {
    PredId id = lookup_apply(text.substr(3));
    return {LiteralKind::PositiveApply, id, preds.apply(id).robot};
  }
  if (text.rfind("npi:", 0) == 0) {
    PredId id = preds.find_avoid(text.substr(4));
    if (id < 0) throw UnknownPredicate("unknown avoid predicate '" + text.substr(4) + "'");
    return {LiteralKind::Avoid, id, kUnassigned};
  }
  if (text.rfind("!npi:", 0) == 0) throw UnknownPredicate("avoid predicates cannot be negated: " + text);
  throw UnknownPredicate("malformed literal '" + text + "'");
}

std::string literal_text(const Literal& l, const PredicateTable& preds) {
  switch (l.kind) {
    case LiteralKind::PositiveApply: return "pi:" + preds.apply(l.pred).name;
    case LiteralKind::NegatedApply: return "!pi:" + preds.apply(l.pred).name;
    case LiteralKind::Avoid: return "npi:" + preds.avoid(l.pred).name;
  }
  return {};
}

}  // namespace mvplan
