#include "mvplan/world.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <set>
#include <string>

#include "mvplan/errors.hpp"

namespace mvplan {

namespace {

std::string cell_str(Cell c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

}  // namespace

Cell offset(Cell c, Primitive p) {
  switch (p) {
    case Primitive::Stay: return c;
    case Primitive::N: return {c.x, c.y + 1};
    case Primitive::S: return {c.x, c.y - 1};
    case Primitive::E: return {c.x + 1, c.y};
    case Primitive::W: return {c.x - 1, c.y};
    case Primitive::NE: return {c.x + 1, c.y + 1};
    case Primitive::NW: return {c.x - 1, c.y + 1};
    case Primitive::SE: return {c.x + 1, c.y - 1};
    case Primitive::SW: return {c.x - 1, c.y - 1};
  }
  return c;
}

int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

WorldModel::WorldModel(int width, int height, std::vector<Cell> obstacles, std::vector<Region> regions,
                       int robot_count, int skill_count, SkillId mobility_skill)
    : width_(width),
      height_(height),
      robots_(robot_count),
      skills_(skill_count),
      mobility_(mobility_skill),
      obstacles_(std::move(obstacles)),
      regions_(std::move(regions)) {
  if (width_ <= 0 || height_ <= 0) throw ScenarioError("grid must be non-empty");
  if (robots_ < 1) throw ScenarioError("at least one robot is required");
  blocked_.assign(static_cast<size_t>(cell_count()), 0);
  region_of_cell_.assign(static_cast<size_t>(cell_count()), -1);
  for (Cell o : obstacles_) {
    if (!in_bounds(o)) throw PositionOutOfBounds("obstacle outside grid at " + cell_str(o));
    blocked_[static_cast<size_t>(index(o))] = 1;
  }
  std::set<std::string> names;
  for (size_t r = 0; r < regions_.size(); ++r) {
    const Region& reg = regions_[r];
    if (!names.insert(reg.name).second) throw ScenarioError("duplicate region name " + reg.name);
    if (!in_bounds(reg.cell)) throw PositionOutOfBounds("region " + reg.name + " outside grid");
    if (blocked_[static_cast<size_t>(index(reg.cell))])
      throw RegionInaccessible("region " + reg.name + " sits on an obstacle");
    int& slot = region_of_cell_[static_cast<size_t>(index(reg.cell))];
    if (slot != -1) throw RegionInaccessible("regions share cell " + cell_str(reg.cell));
    slot = static_cast<int>(r);
  }
  if (!regions_.empty()) {
    std::vector<int> d = hop_distances(regions_.front().cell);
    for (const Region& reg : regions_)
      if (d[static_cast<size_t>(index(reg.cell))] < 0)
        throw RegionInaccessible("region " + reg.name + " is not connected to " + regions_.front().name);
  }
}

std::optional<RegionId> WorldModel::region_at(Cell c) const {
  if (!in_bounds(c)) return std::nullopt;
  int r = region_of_cell_[static_cast<size_t>(index(c))];
  if (r < 0) return std::nullopt;
  return r;
}

std::optional<RegionId> WorldModel::find_region(const std::string& name) const {
  for (size_t r = 0; r < regions_.size(); ++r)
    if (regions_[r].name == name) return static_cast<RegionId>(r);
  return std::nullopt;
}

Cell WorldModel::step(Cell from, Primitive p) const {
  if (!is_free(from)) throw IllegalMove("start cell " + cell_str(from) + " is not free");
  Cell to = offset(from, p);
  if (!in_bounds(to)) throw IllegalMove("move leaves the grid at " + cell_str(to));
  if (blocked_[static_cast<size_t>(index(to))]) throw IllegalMove("move into obstacle at " + cell_str(to));
  return to;
}

std::vector<Cell> WorldModel::successors(Cell from) const {
  std::vector<Cell> out;
  out.reserve(9);
  for (Primitive p : kAllPrimitives) {
    Cell to = offset(from, p);
    if (is_free(to)) out.push_back(to);
  }
  return out;
}

std::vector<int> WorldModel::hop_distances(Cell from) const {
  std::vector<int> d(static_cast<size_t>(cell_count()), -1);
  if (!is_free(from)) return d;
  std::deque<Cell> q{from};
  d[static_cast<size_t>(index(from))] = 0;
  while (!q.empty()) {
    Cell c = q.front();
    q.pop_front();
    for (Cell n : successors(c)) {
      int& dn = d[static_cast<size_t>(index(n))];
      if (dn < 0) {
        dn = d[static_cast<size_t>(index(c))] + 1;
        q.push_back(n);
      }
    }
  }
  return d;
}

CapabilityMatrix::CapabilityMatrix(int robots, int skills)
    : skills_(skills), rows_(static_cast<size_t>(robots), std::vector<char>(static_cast<size_t>(skills) + 1, 0)) {}

bool CapabilityMatrix::has(RobotId j, SkillId c) const {
  if (c == kIdle) return true;
  if (j < 0 || j >= robot_count() || c < 0 || c > skills_) return false;
  return rows_[static_cast<size_t>(j)][static_cast<size_t>(c)] != 0;
}

void CapabilityMatrix::grant(RobotId j, SkillId c) {
  rows_.at(static_cast<size_t>(j)).at(static_cast<size_t>(c)) = 1;
}

void CapabilityMatrix::revoke(RobotId j, SkillId c) {
  rows_.at(static_cast<size_t>(j)).at(static_cast<size_t>(c)) = 0;
}

std::vector<SkillId> CapabilityMatrix::skills_of(RobotId j) const {
  std::vector<SkillId> out;
  for (SkillId c = 1; c <= skills_; ++c)
    if (has(j, c)) out.push_back(c);
  return out;
}

Teams teams(const CapabilityMatrix& z) {
  Teams t(static_cast<size_t>(z.skill_count()) + 1);
  for (SkillId c = 1; c <= z.skill_count(); ++c)
    for (RobotId j = 0; j < z.robot_count(); ++j)
      if (z.has(j, c)) t[static_cast<size_t>(c)].push_back(j);
  return t;
}

FailureOutcome apply_failure(const CapabilityMatrix& z, const FailureEvent& ev,
                             const std::vector<AssignedTask>& assignment) {
  FailureOutcome out{z, {}};
  for (const SkillLoss& loss : ev.losses) {
    if (loss.robot < 0 || loss.robot >= z.robot_count())
      throw ScenarioError("failure references unknown robot " + std::to_string(loss.robot + 1));
    if (loss.skill == kIdle) {
      for (SkillId c = 1; c <= z.skill_count(); ++c) out.z.revoke(loss.robot, c);
    } else {
      if (loss.skill < 1 || loss.skill > z.skill_count())
        throw ScenarioError("failure references unknown skill " + std::to_string(loss.skill));
      out.z.revoke(loss.robot, loss.skill);
    }
  }
  std::set<int> failed;
  for (const AssignedTask& a : assignment)
    if (!out.z.has(a.robot, a.skill)) failed.insert(a.predicate);
  out.failed.assign(failed.begin(), failed.end());
  return out;
}

}  // namespace mvplan
