#pragma once

#include <vector>

#include "sigtraj/scene.hpp"

namespace sigtraj {

// K half-open displacement-magnitude intervals over the prediction horizon:
// [0,1), [1, D/(K-2)), ..., [(K-3)*D/(K-2), D), [D, +inf). Interval k indexes
// strategy mode k.
struct ManeuverIntervals {
  struct Interval {
    double lo = 0.0;
    double hi = 0.0;  // +inf for the last interval
  };
  std::vector<Interval> intervals;
  double diameter = 0.0;

  int size() const { return static_cast<int>(intervals.size()); }
  // The unique interval containing displacement x >= 0.
  int index_of(double displacement) const;
};

// Requires K >= 3 and D > K-2 (strictly increasing breakpoints).
ManeuverIntervals maneuver_intervals(double diameter, int num_modes);

// Interval index of the straight-line displacement between the agent's pose
// at t_c and its last valid future position; -1 when no valid future frame
// exists (excluded from the classification loss).
int classify_gt_strategy(const AgentTrack& track, const ManeuverIntervals& intervals);

}  // namespace sigtraj
