#include "sigtraj/strategy.hpp"

#include <cmath>
#include <limits>

namespace sigtraj {

ManeuverIntervals maneuver_intervals(double diameter, int num_modes) {
  if (num_modes < 3) throw ValidationError("maneuver_intervals: K must be >= 3");
  if (diameter <= static_cast<double>(num_modes - 2))
    throw ValidationError("maneuver_intervals: degenerate geometry, D must exceed K-2");
  ManeuverIntervals out;
  out.diameter = diameter;
  const double step = diameter / (num_modes - 2);
  std::vector<double> breaks = {0.0, 1.0};
  for (int i = 1; i < num_modes - 2; ++i) breaks.push_back(i * step);
  breaks.push_back(diameter);
  for (size_t i = 0; i + 1 < breaks.size(); ++i) out.intervals.push_back({breaks[i], breaks[i + 1]});
  out.intervals.push_back({diameter, std::numeric_limits<double>::infinity()});
  return out;
}

int ManeuverIntervals::index_of(double displacement) const {
  if (displacement < 0.0) displacement = 0.0;
  for (size_t i = 0; i < intervals.size(); ++i)
    if (displacement >= intervals[i].lo && displacement < intervals[i].hi) return static_cast<int>(i);
  return size() - 1;
}

int classify_gt_strategy(const AgentTrack& track, const ManeuverIntervals& intervals) {
  Pose origin;
  if (!track.last_valid_pose(origin)) return -1;
  int last_valid = -1;
  for (int i = static_cast<int>(track.future_gt.size()) - 1; i >= 0; --i)
    if (track.future_valid[static_cast<size_t>(i)]) {
      last_valid = i;
      break;
    }
  if (last_valid < 0) return -1;
  const double displacement = dist(track.future_gt[static_cast<size_t>(last_valid)], origin.p);
  return intervals.index_of(displacement);
}

}  // namespace sigtraj
