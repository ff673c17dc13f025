#pragma once

#include <stdexcept>
#include <string>

namespace mvplan {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MVPLAN_ERROR(Name)                                   \
  class Name : public Error {                                \
   public:                                                   \
    explicit Name(const std::string& what) : Error(what) {}  \
  }

MVPLAN_ERROR(PositionOutOfBounds);
MVPLAN_ERROR(SkillNotPossessed);
MVPLAN_ERROR(IllegalMove);
MVPLAN_ERROR(RegionInaccessible);
MVPLAN_ERROR(UnknownPredicate);
MVPLAN_ERROR(DanglingState);
MVPLAN_ERROR(NoInitialState);
MVPLAN_ERROR(NoAcceptingState);
MVPLAN_ERROR(NoAcceptingPath);
MVPLAN_ERROR(Infeasible);
MVPLAN_ERROR(SegmentInfeasible);
MVPLAN_ERROR(FailedPredicateAbsent);
MVPLAN_ERROR(NoCandidate);
MVPLAN_ERROR(TooLarge);
MVPLAN_ERROR(ScenarioError);
MVPLAN_ERROR(InfeasibleMission);

#undef MVPLAN_ERROR

}  // namespace mvplan
