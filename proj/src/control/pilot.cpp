#include "control/pilot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vrgcs::control {

void PilotLimits::validate() const {
  if (!(v_max > 0.0)) throw std::invalid_argument("v_max must be positive");
  if (!(yaw_rate_max > 0.0)) throw std::invalid_argument("yaw_rate_max must be positive");
  if (!(hover_altitude > touchdown_height)) throw std::invalid_argument("hover_altitude too low");
  if (!(climb_rate > 0.0) || !(land_rate > 0.0))
    throw std::invalid_argument("climb and land rates must be positive");
  if (!(command_timeout >= 0.0)) throw std::invalid_argument("command_timeout must be >= 0");
}

std::string_view to_string(FlightMode mode) {
  switch (mode) {
    case FlightMode::Landed: return "landed";
    case FlightMode::TakingOff: return "taking-off";
    case FlightMode::Flying: return "flying";
    case FlightMode::Landing: return "landing";
  }
  return "unknown";
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::None: return "none";
    case RejectReason::NoAuthority: return "no-authority";
    case RejectReason::NotArmed: return "not-armed";
  }
  return "unknown";
}

VelocityCommand clamp_command(const VelocityCommand& cmd, const PilotLimits& limits) {
  auto finite_or_zero = [](double v) { return std::isfinite(v) ? v : 0.0; };
  VelocityCommand out{finite_or_zero(cmd.vx), finite_or_zero(cmd.vy), finite_or_zero(cmd.vz),
                      finite_or_zero(cmd.yaw_rate)};
  const double planar = std::hypot(out.vx, out.vy);
  if (planar > limits.v_max) {
    out.vx *= limits.v_max / planar;
    out.vy *= limits.v_max / planar;
  }
  out.vz = std::clamp(out.vz, -limits.v_max, limits.v_max);
  out.yaw_rate = std::clamp(out.yaw_rate, -limits.yaw_rate_max, limits.yaw_rate_max);
  return out;
}

CommandOutcome admit(PilotState& pilot, PilotAction action, const VelocityCommand& cmd,
                     const dynamics::VehicleState& state, const PilotLimits& limits) {
  switch (action) {
    case PilotAction::Velocity:
      if (pilot.mode != FlightMode::Flying) return CommandOutcome::rejected(RejectReason::NotArmed);
      pilot.command = clamp_command(cmd, limits);
      pilot.command_time = state.time;
      return CommandOutcome::ok();
    case PilotAction::Takeoff:
      if (pilot.mode != FlightMode::Landed) return CommandOutcome::rejected(RejectReason::NotArmed);
      pilot.mode = FlightMode::TakingOff;
      pilot.position_target = state.position;
      try {
        const Vec3 h = heading_vector(state.attitude);
        pilot.heading = std::atan2(h.y(), h.x());
      } catch (const DegenerateHeadingError&) {
        // keep the previous heading
      }
      pilot.command = {};
      pilot.command_time = state.time;
      return CommandOutcome::ok();
    case PilotAction::Land:
      if (pilot.mode != FlightMode::Flying && pilot.mode != FlightMode::TakingOff)
        return CommandOutcome::rejected(RejectReason::NotArmed);
      pilot.mode = FlightMode::Landing;
      pilot.command = {};
      return CommandOutcome::ok();
  }
  return CommandOutcome::rejected(RejectReason::NotArmed);
}

Setpoint velocity_command_to_setpoint(PilotState& pilot, const dynamics::VehicleState& state,
                                      const PilotLimits& limits, double dt) {
  Setpoint sp;
  switch (pilot.mode) {
    case FlightMode::Landed:
      pilot.position_target = state.position;
      break;
    case FlightMode::TakingOff: {
      const double z = pilot.position_target.z() + limits.climb_rate * dt;
      if (z >= limits.hover_altitude) {
        pilot.position_target.z() = limits.hover_altitude;
        pilot.mode = FlightMode::Flying;
      } else {
        pilot.position_target.z() = z;
        sp.velocity_target.z() = limits.climb_rate;
      }
      break;
    }
    case FlightMode::Flying: {
      VelocityCommand cmd = pilot.command;
      if (limits.command_timeout > 0.0 && state.time - pilot.command_time > limits.command_timeout)
        cmd = {};
      const double c = std::cos(pilot.heading), s = std::sin(pilot.heading);
      const Vec3 world_velocity(c * cmd.vx - s * cmd.vy, s * cmd.vx + c * cmd.vy, cmd.vz);
      pilot.position_target += world_velocity * dt;
      pilot.heading = std::remainder(pilot.heading + cmd.yaw_rate * dt, 2.0 * std::numbers::pi);
      sp.velocity_target = world_velocity;
      sp.angular_velocity_target = Vec3(0.0, 0.0, cmd.yaw_rate);
      break;
    }
    case FlightMode::Landing: {
      // Keep descending below ground level so contact is guaranteed.
      pilot.position_target.z() = std::max(pilot.position_target.z() - limits.land_rate * dt, -0.5);
      sp.velocity_target.z() = pilot.position_target.z() > -0.5 ? -limits.land_rate : 0.0;
      break;
    }
  }
  sp.position_target = pilot.position_target;
  sp.heading_target = Eigen::Vector2d(std::cos(pilot.heading), std::sin(pilot.heading));
  return sp;
}

bool detect_touchdown(PilotState& pilot, const dynamics::VehicleState& state,
                      const PilotLimits& limits) {
  if (pilot.mode != FlightMode::Landing || state.position.z() > limits.touchdown_height)
    return false;
  pilot.mode = FlightMode::Landed;
  pilot.command = {};
  return true;
}

}  // namespace vrgcs::control
