#pragma once

#include "dynamics/dynamics.hpp"
#include "scan/world.hpp"
#include "telemetry/latency.hpp"

#include <span>
#include <stdexcept>

namespace vrgcs::telemetry {

/// Pass thresholds for the wall-approach mission.
struct MissionCriteria {
  double min_clearance = 0.5;       // m
  double max_return_error = 0.10;   // m
  double max_touchdown_speed = 0.2; // m/s
  double max_sample_gap = 0.1;      // s
  double ground_height = 0.01;      // m
};

struct MissionReport {
  double min_wall_clearance = 0.0;
  double return_error = 0.0;
  double touchdown_speed = 0.0;
  double max_latency_ms = 0.0;
  double mean_latency_ms = 0.0;
  double median_latency_ms = 0.0;
  bool passed = false;
};

class TrajectoryGapError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Clearance is the minimum point-to-obstacle distance over the trajectory;
/// return error the horizontal distance between first and last sample;
/// touchdown speed |vz| at the first sample of the final on-ground segment
/// (infinite if the vehicle never came down). Latency fields stay zero when
/// no log is given or the log is empty.
MissionReport evaluate_mission(std::span<const dynamics::VehicleState> trajectory,
                               const scan::WorldModel& world, const MissionCriteria& criteria = {},
                               const LatencyLog* latency = nullptr);

}  // namespace vrgcs::telemetry
