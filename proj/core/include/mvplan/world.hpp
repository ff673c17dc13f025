#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mvplan {

// Robots are 0-based internally; scenario files and logs use 1-based ids.
using RobotId = int;
// Skills are 1..C; 0 is idle.
using SkillId = int;
using RegionId = int;

inline constexpr SkillId kIdle = 0;

struct Cell {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

enum class Primitive { Stay, N, S, E, W, NE, NW, SE, SW };

inline constexpr Primitive kAllPrimitives[] = {Primitive::Stay, Primitive::N,  Primitive::S,
                                               Primitive::E,    Primitive::W,  Primitive::NE,
                                               Primitive::NW,   Primitive::SE, Primitive::SW};

struct Region {
  std::string name;
  Cell cell;
};

class WorldModel {
 public:
  WorldModel() = default;
  // Throws RegionInaccessible if a region cell is blocked, duplicated, or not
  // connected to every other region through free space.
  WorldModel(int width, int height, std::vector<Cell> obstacles, std::vector<Region> regions,
             int robot_count, int skill_count, SkillId mobility_skill = 1);

  int width() const { return width_; }
  int height() const { return height_; }
  int robot_count() const { return robots_; }
  int skill_count() const { return skills_; }
  SkillId mobility_skill() const { return mobility_; }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool is_free(Cell c) const { return in_bounds(c) && !blocked_[index(c)]; }
  int index(Cell c) const { return c.y * width_ + c.x; }
  Cell cell_at(int idx) const { return Cell{idx % width_, idx / width_}; }
  int cell_count() const { return width_ * height_; }

  const std::vector<Region>& regions() const { return regions_; }
  const Region& region(RegionId r) const { return regions_.at(static_cast<size_t>(r)); }
  std::optional<RegionId> region_at(Cell c) const;
  std::optional<RegionId> find_region(const std::string& name) const;
  const std::vector<Cell>& obstacles() const { return obstacles_; }

  // One primitive; throws IllegalMove on obstacles or leaving the grid.
  Cell step(Cell from, Primitive p) const;
  // Free cells reachable in one primitive, including `from` itself.
  std::vector<Cell> successors(Cell from) const;
  // 8-connected hop distance through free cells; -1 if unreachable.
  std::vector<int> hop_distances(Cell from) const;

 private:
  int width_ = 0;
  int height_ = 0;
  int robots_ = 0;
  int skills_ = 0;
  SkillId mobility_ = 1;
  std::vector<Cell> obstacles_;
  std::vector<Region> regions_;
  std::vector<char> blocked_;
  std::vector<int> region_of_cell_;
};

Cell offset(Cell c, Primitive p);
int manhattan(Cell a, Cell b);

// Z: per-robot skill bits over skills 1..C. Failures only clear bits.
class CapabilityMatrix {
 public:
  CapabilityMatrix() = default;
  CapabilityMatrix(int robots, int skills);

  int robot_count() const { return static_cast<int>(rows_.size()); }
  int skill_count() const { return skills_; }
  bool has(RobotId j, SkillId c) const;
  void grant(RobotId j, SkillId c);
  void revoke(RobotId j, SkillId c);
  std::vector<SkillId> skills_of(RobotId j) const;

  friend bool operator==(const CapabilityMatrix&, const CapabilityMatrix&) = default;

 private:
  int skills_ = 0;
  std::vector<std::vector<char>> rows_;
};

// Index by skill; entry 0 is unused. Robot sets are sorted ascending.
using Teams = std::vector<std::vector<RobotId>>;

Teams teams(const CapabilityMatrix& z);

// skill == kIdle in a loss means "all skills" (complete robot failure).
struct SkillLoss {
  RobotId robot = 0;
  SkillId skill = kIdle;
  friend auto operator<=>(const SkillLoss&, const SkillLoss&) = default;
};

struct FailureEvent {
  int time = 0;
  std::vector<SkillLoss> losses;
};

// (predicate id, robot currently assigned to it, skill it needs)
struct AssignedTask {
  int predicate = 0;
  RobotId robot = 0;
  SkillId skill = 0;
};

struct FailureOutcome {
  CapabilityMatrix z;
  std::vector<int> failed;  // sorted predicate ids
};

FailureOutcome apply_failure(const CapabilityMatrix& z, const FailureEvent& ev,
                             const std::vector<AssignedTask>& assignment);

}  // namespace mvplan
