#include "telemetry/mission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace vrgcs::telemetry {

MissionReport evaluate_mission(std::span<const dynamics::VehicleState> trajectory,
                               const scan::WorldModel& world, const MissionCriteria& criteria,
                               const LatencyLog* latency) {
  if (trajectory.empty()) throw TrajectoryGapError("empty trajectory");
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    const double gap = trajectory[i].time - trajectory[i - 1].time;
    if (gap > criteria.max_sample_gap || gap <= 0.0)
      throw TrajectoryGapError("trajectory gap of " + std::to_string(gap) + " s at t=" +
                               std::to_string(trajectory[i - 1].time));
  }

  MissionReport report;
  report.min_wall_clearance = std::numeric_limits<double>::infinity();
  for (const dynamics::VehicleState& s : trajectory)
    report.min_wall_clearance =
        std::min(report.min_wall_clearance, scan::obstacle_distance(world, s.position));

  const Eigen::Vector2d start = trajectory.front().position.head<2>();
  const Eigen::Vector2d end = trajectory.back().position.head<2>();
  report.return_error = (end - start).norm();

  // Walk back over the final on-ground segment to its first sample.
  std::size_t i = trajectory.size();
  while (i > 0 && trajectory[i - 1].position.z() <= criteria.ground_height) --i;
  report.touchdown_speed = i == trajectory.size()
                               ? std::numeric_limits<double>::infinity()
                               : std::abs(trajectory[i].velocity.z());

  if (latency && !latency->empty()) {
    const LatencyStats s = latency_stats(*latency);
    report.max_latency_ms = s.max_ms;
    report.mean_latency_ms = s.mean_ms;
    report.median_latency_ms = s.median_ms;
  }

  report.passed = report.min_wall_clearance >= criteria.min_clearance &&
                  report.return_error <= criteria.max_return_error &&
                  report.touchdown_speed <= criteria.max_touchdown_speed;
  return report;
}

}  // namespace vrgcs::telemetry
