#pragma once

#include <string>
#include <vector>

#include "mvplan/automaton.hpp"
#include "mvplan/planner.hpp"

namespace mvplan {

// Automaton-state projection of a plan from step k. Indices are plan steps
// extended by one wrap: index length() means suffix.front() again.
struct PlanProjection {
  std::vector<StateId> pre;
  std::vector<size_t> z_pre;
  std::vector<StateId> suf;  // starts and ends at the suffix's accepting state
  std::vector<size_t> z_suf;
};

PlanProjection project_plan(const HybridPlan& plan, size_t k);

// plan.at(k) with the one-step wrap used by the projection.
const HybridState& extended_at(const HybridPlan& plan, size_t k);

struct OverlapEdge {
  bool in_suffix = false;
  int m = 0;        // edge index in the candidate's prefix/suffix state list
  int m_bar = 0;    // edge index in the projection
  size_t k1 = 0;    // reused span of old plan steps k1..k2
  size_t k2 = 0;
};

struct TrueOverlap {
  std::vector<OverlapEdge> overlap;  // edges shared with the old plan
  std::vector<OverlapEdge> kept;     // reusable subset, increasing in m within each part
};

TrueOverlap true_overlap(const StatePath& cheapest, const PlanProjection& proj, const HybridPlan& plan,
                         const PlanContext& ctx);

enum class ReplanMode { Local, Global };

struct ReplanResult {
  HybridPlan plan;
  ReplanMode mode = ReplanMode::Global;
  StatePath cheapest;
  int overlap = 0;
  int true_overlap = 0;
  std::vector<std::pair<size_t, size_t>> reused;  // spans of the old plan
};

// `plan` must already start at the current step (prefix[0] is now); the
// current state's skills are re-chosen. Throws Infeasible.
ReplanResult replan(const HybridPlan& plan, const PlanContext& ctx);

// Forces the local stitching of one candidate; nullopt when a segment is
// infeasible or nothing is reusable.
std::optional<ReplanResult> replan_local(const HybridPlan& plan, const StatePath& cheapest, const PlanContext& ctx);

ReplanResult replan_global(const HybridPlan& plan, const PlanContext& ctx);

// Rotates a plan so that step k becomes prefix[0]; suffix steps map to the
// remainder of the current cycle followed by the full cycle.
HybridPlan rebase(const HybridPlan& plan, size_t k);

std::string to_string(ReplanMode m);

}  // namespace mvplan
