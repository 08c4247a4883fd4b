#pragma once

#include "control/controller.hpp"

#include <string_view>

namespace vrgcs::control {

/// Pilot stick intent: planar velocity in the heading frame (vx forward,
/// vy left), vertical velocity and yaw rate.
struct VelocityCommand {
  double vx = 0.0;
  double vy = 0.0;
  double vz = 0.0;
  double yaw_rate = 0.0;
};

struct PilotLimits {
  double v_max = 1.0;
  double yaw_rate_max = 1.0;
  double hover_altitude = 1.0;
  double climb_rate = 0.5;
  double land_rate = 0.15;
  double touchdown_height = 0.01;
  /// Stale velocity commands decay to zero after this long; 0 disables.
  double command_timeout = 0.0;

  void validate() const;
};

enum class FlightMode { Landed, TakingOff, Flying, Landing };

std::string_view to_string(FlightMode mode);

enum class PilotAction { Velocity, Takeoff, Land };

enum class RejectReason { None, NoAuthority, NotArmed };

std::string_view to_string(RejectReason reason);

struct CommandOutcome {
  bool accepted = false;
  RejectReason reason = RejectReason::None;

  static CommandOutcome ok() { return {true, RejectReason::None}; }
  static CommandOutcome rejected(RejectReason r) { return {false, r}; }
};

/// Per-vehicle pilot memory: flight mode, the integrated position target and
/// the commanded heading.
struct PilotState {
  FlightMode mode = FlightMode::Landed;
  Vec3 position_target = Vec3::Zero();
  double heading = 0.0;
  VelocityCommand command;
  double command_time = 0.0;
};

/// Clamps the horizontal speed to v_max (so every world-frame component stays
/// within v_max), vz to v_max and yaw rate to yaw_rate_max.
VelocityCommand clamp_command(const VelocityCommand& cmd, const PilotLimits& limits);

/// Mode gate for pilot actions. Velocity commands are only valid while
/// flying, takeoff only from the ground, land only while airborne.
CommandOutcome admit(PilotState& pilot, PilotAction action, const VelocityCommand& cmd,
                     const dynamics::VehicleState& state, const PilotLimits& limits);

/// Advances the pilot targets by dt and returns the setpoint for the
/// controller. Switches TakingOff to Flying once hover altitude is reached.
Setpoint velocity_command_to_setpoint(PilotState& pilot, const dynamics::VehicleState& state,
                                      const PilotLimits& limits, double dt);

/// Landing to Landed transition; returns true on touchdown.
bool detect_touchdown(PilotState& pilot, const dynamics::VehicleState& state,
                      const PilotLimits& limits);

}  // namespace vrgcs::control
