#pragma once

#include "control/controller.hpp"
#include "control/pilot.hpp"
#include "scan/voxel_map.hpp"
#include "scan/world.hpp"
#include "station/config.hpp"
#include "station/script.hpp"

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <vector>

namespace vrgcs::station {

/// The authoritative vehicle + map simulation, advanced one physics tick at a
/// time by a single owner thread. Pilot commands may arrive from any thread.
class Simulation {
 public:
  struct TickResult {
    bool scanned = false;
    bool pose_due = false;
    bool touched_down = false;
    std::set<scan::ChunkCoord> dirty;
  };

  Simulation(ServerConfig config, scan::WorldModel world);

  TickResult tick();

  /// Thread-safe mode gate + clamp.
  control::CommandOutcome command(control::PilotAction action,
                                  const control::VelocityCommand& cmd = {});

  void set_mapping(bool enabled) { mapping_.store(enabled); }
  bool mapping() const { return mapping_.load(); }

  const dynamics::VehicleState& state() const { return state_; }
  control::FlightMode mode() const;
  double dt() const { return dt_; }
  std::uint64_t ticks() const { return ticks_; }

  const ServerConfig& config() const { return config_; }
  const scan::WorldModel& world() const { return world_; }
  const scan::VoxelMap& map() const { return map_; }

  /// One sample per tick, starting with the initial state.
  const std::vector<dynamics::VehicleState>& trajectory() const { return trajectory_; }
  void set_record_trajectory(bool on) { record_ = on; }

  const std::vector<scan::Pose>& scan_poses() const { return scan_poses_; }

  /// Largest |component| of any commanded velocity target so far.
  double max_setpoint_speed() const { return max_setpoint_speed_; }

 private:
  ServerConfig config_;
  scan::WorldModel world_;
  scan::VoxelMap map_;
  double dt_;

  dynamics::VehicleState state_;
  control::ControllerMemory memory_;

  mutable std::mutex pilot_mutex_;
  control::PilotState pilot_;
  dynamics::VehicleState shared_state_;  // copy of state_ guarded by pilot_mutex_

  std::atomic<bool> mapping_;
  std::uint64_t ticks_ = 0;
  bool record_ = true;
  std::vector<dynamics::VehicleState> trajectory_;
  std::vector<scan::Pose> scan_poses_;
  double max_setpoint_speed_ = 0.0;
};

/// Applies script events at their times and ticks until the script is
/// exhausted and the vehicle is on the ground (or max_tail_s after the last
/// event). A scripted cmd_vel is held, like a stick, until the next one.
class ScriptRunner {
 public:
  ScriptRunner(Simulation& sim, std::vector<ScriptEvent> events, double max_tail_s = 60.0);

  /// Applies due events; call once before each tick.
  void apply_due();
  bool done() const;
  bool timed_out() const;

  /// Convenience: apply/tick until done.
  Simulation::TickResult step();
  bool run();

 private:
  Simulation& sim_;
  std::vector<ScriptEvent> events_;
  std::size_t next_ = 0;
  double end_time_;
  std::optional<control::VelocityCommand> held_;
};

}  // namespace vrgcs::station
