#include "control/controller.hpp"
#include "control/pilot.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace vrgcs;
using namespace vrgcs::control;
using dynamics::VehicleState;

namespace {

PilotState flying_at(const Vec3& p, double heading = 0.0) {
  PilotState pilot;
  pilot.mode = FlightMode::Flying;
  pilot.position_target = p;
  pilot.heading = heading;
  return pilot;
}

}  // namespace

TEST_CASE("clamp contract") {
  const PilotLimits lim;
  auto c = clamp_command({5.0, 0, 0, 0}, lim);
  CHECK(c.vx == 1.0);
  c = clamp_command({3, 4, -7, 9}, lim);
  CHECK(std::hypot(c.vx, c.vy) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.vx == doctest::Approx(0.6));
  CHECK(c.vz == -1.0);
  CHECK(c.yaw_rate == 1.0);
  c = clamp_command({0.2, -0.3, 0.4, -0.5}, lim);
  CHECK(c.vx == 0.2);
  CHECK(c.vy == -0.3);
  CHECK(c.vz == 0.4);
  CHECK(c.yaw_rate == -0.5);
  c = clamp_command({std::nan(""), INFINITY, 0, 0}, lim);
  CHECK(c.vx == 0.0);
  CHECK(c.vy == 0.0);
}

TEST_CASE("mode gate enumeration") {
  const PilotLimits lim;
  const VehicleState s;
  struct Row {
    FlightMode mode;
    PilotAction action;
    bool accepted;
    FlightMode after;
  };
  const Row table[] = {
      {FlightMode::Landed, PilotAction::Velocity, false, FlightMode::Landed},
      {FlightMode::Landed, PilotAction::Takeoff, true, FlightMode::TakingOff},
      {FlightMode::Landed, PilotAction::Land, false, FlightMode::Landed},
      {FlightMode::TakingOff, PilotAction::Velocity, false, FlightMode::TakingOff},
      {FlightMode::TakingOff, PilotAction::Takeoff, false, FlightMode::TakingOff},
      {FlightMode::TakingOff, PilotAction::Land, true, FlightMode::Landing},
      {FlightMode::Flying, PilotAction::Velocity, true, FlightMode::Flying},
      {FlightMode::Flying, PilotAction::Takeoff, false, FlightMode::Flying},
      {FlightMode::Flying, PilotAction::Land, true, FlightMode::Landing},
      {FlightMode::Landing, PilotAction::Velocity, false, FlightMode::Landing},
      {FlightMode::Landing, PilotAction::Takeoff, false, FlightMode::Landing},
      {FlightMode::Landing, PilotAction::Land, false, FlightMode::Landing},
  };
  for (const Row& row : table) {
    PilotState pilot;
    pilot.mode = row.mode;
    const CommandOutcome out = admit(pilot, row.action, {0.5, 0, 0, 0}, s, lim);
    CAPTURE(to_string(row.mode));
    CHECK(out.accepted == row.accepted);
    CHECK(out.reason == (row.accepted ? RejectReason::None : RejectReason::NotArmed));
    CHECK(pilot.mode == row.after);
  }
  CHECK(to_string(RejectReason::NotArmed) == "not-armed");
  CHECK(to_string(RejectReason::NoAuthority) == "no-authority");
}

TEST_CASE("takeoff captures position and heading") {
  PilotState pilot;
  VehicleState s;
  s.position = Vec3(1, 2, 0);
  s.attitude = dynamics::rotation_from_euler(0, 0, 0.7);
  REQUIRE(admit(pilot, PilotAction::Takeoff, {}, s, {}).accepted);
  CHECK(pilot.position_target == s.position);
  CHECK(pilot.heading == doctest::Approx(0.7));
}

TEST_CASE("takeoff ramps to hover altitude then flies") {
  PilotLimits lim;
  PilotState pilot;
  VehicleState s;
  admit(pilot, PilotAction::Takeoff, {}, s, lim);
  const double dt = 0.002;
  int ticks = 0;
  while (pilot.mode == FlightMode::TakingOff && ticks < 10000) {
    const Setpoint sp = velocity_command_to_setpoint(pilot, s, lim, dt);
    CHECK(sp.position_target.z() <= lim.hover_altitude);
    ++ticks;
  }
  CHECK(pilot.mode == FlightMode::Flying);
  CHECK(pilot.position_target.z() == lim.hover_altitude);
  CHECK(ticks * dt == doctest::Approx(lim.hover_altitude / lim.climb_rate).epsilon(1e-2));
}

TEST_CASE("centered sticks hold position") {
  PilotState pilot = flying_at(Vec3(1, 1, 1));
  VehicleState s;
  for (int i = 0; i < 100; ++i) {
    const Setpoint sp = velocity_command_to_setpoint(pilot, s, {}, 0.002);
    CHECK(sp.velocity_target.norm() == 0.0);
    CHECK(sp.position_target == Vec3(1, 1, 1));
  }
}

TEST_CASE("full forward stick moves along the heading at v_max") {
  const PilotLimits lim;
  VehicleState s;
  PilotState pilot = flying_at(Vec3(0, 0, 1));
  REQUIRE(admit(pilot, PilotAction::Velocity, {1, 0, 0, 0}, s, lim).accepted);
  Setpoint sp = velocity_command_to_setpoint(pilot, s, lim, 0.002);
  CHECK(sp.velocity_target == Vec3(lim.v_max, 0, 0));

  PilotState turned = flying_at(Vec3(0, 0, 1), std::numbers::pi / 2);
  admit(turned, PilotAction::Velocity, {1, 0, 0, 0}, s, lim);
  sp = velocity_command_to_setpoint(turned, s, lim, 0.002);
  CHECK(sp.velocity_target.x() == doctest::Approx(0.0));
  CHECK(sp.velocity_target.y() == doctest::Approx(1.0));
  CHECK(sp.heading_target->y() == doctest::Approx(1.0));
}

TEST_CASE("position target integrates the commanded velocity") {
  PilotLimits lim;
  VehicleState s;
  PilotState pilot = flying_at(Vec3(0, 0, 1));
  admit(pilot, PilotAction::Velocity, {0.5, -0.25, 0.1, 0}, s, lim);
  for (int i = 0; i < 500; ++i) velocity_command_to_setpoint(pilot, s, lim, 0.002);
  CHECK(pilot.position_target.x() == doctest::Approx(0.5));
  CHECK(pilot.position_target.y() == doctest::Approx(-0.25));
  CHECK(pilot.position_target.z() == doctest::Approx(1.1));
}

TEST_CASE("yaw rate turns the heading and passes through as angular velocity target") {
  PilotLimits lim;
  VehicleState s;
  PilotState pilot = flying_at(Vec3(0, 0, 1));
  admit(pilot, PilotAction::Velocity, {0, 0, 0, 0.5}, s, lim);
  Setpoint sp;
  for (int i = 0; i < 500; ++i) sp = velocity_command_to_setpoint(pilot, s, lim, 0.002);
  CHECK(pilot.heading == doctest::Approx(0.5));
  CHECK(sp.angular_velocity_target == Vec3(0, 0, 0.5));
  CHECK(sp.heading_target->x() == doctest::Approx(std::cos(0.5)));
}

TEST_CASE("stale commands decay to zero after the timeout") {
  PilotLimits lim;
  lim.command_timeout = 0.5;
  VehicleState s;
  PilotState pilot = flying_at(Vec3(0, 0, 1));
  admit(pilot, PilotAction::Velocity, {1, 0, 0, 0}, s, lim);
  s.time = 0.4;
  CHECK(velocity_command_to_setpoint(pilot, s, lim, 0.002).velocity_target.x() == 1.0);
  s.time = 0.6;
  CHECK(velocity_command_to_setpoint(pilot, s, lim, 0.002).velocity_target.x() == 0.0);
  lim.command_timeout = 0.0;
  s.time = 100.0;
  CHECK(velocity_command_to_setpoint(pilot, s, lim, 0.002).velocity_target.x() == 1.0);
}

TEST_CASE("landing from one metre touches down gently") {
  const dynamics::VehicleParams params;
  const PilotLimits lim;
  ControllerMemory mem;
  VehicleState s;
  s.position = Vec3(0, 0, 1);
  PilotState pilot = flying_at(s.position);
  REQUIRE(admit(pilot, PilotAction::Land, {}, s, lim).accepted);
  const double dt = 0.002;
  double touchdown_speed = -1.0;
  for (int i = 0; i < 20000 && touchdown_speed < 0; ++i) {
    const Setpoint sp = velocity_command_to_setpoint(pilot, s, lim, dt);
    s = dynamics::step(s, control_step(s, sp, GainSet{}, params, mem), params, dt);
    if (detect_touchdown(pilot, s, lim)) touchdown_speed = std::abs(s.velocity.z());
  }
  CHECK(pilot.mode == FlightMode::Landed);
  CHECK(touchdown_speed >= 0.0);
  CHECK(touchdown_speed <= 0.2);
}

TEST_CASE("limits validation") {
  PilotLimits lim;
  CHECK_NOTHROW(lim.validate());
  lim.v_max = 0.0;
  CHECK_THROWS_AS(lim.validate(), std::invalid_argument);
}
