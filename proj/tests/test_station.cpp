#include "station/config.hpp"
#include "station/script.hpp"
#include "station/simulation.hpp"

#include <doctest.h>

#include <filesystem>

using namespace vrgcs;
using namespace vrgcs::station;

namespace {

const std::filesystem::path kSource(VRGCS_SOURCE_DIR);

scan::WorldModel wall() { return scan::load_world(kSource / "worlds" / "wall.world"); }

}  // namespace

TEST_CASE("default config file matches built-in defaults") {
  const ServerConfig file = load_config(kSource / "config" / "default.conf");
  const ServerConfig builtin;
  CHECK(file.port == builtin.port);
  CHECK(file.physics_rate_hz == 500.0);
  CHECK(file.scan_rate_hz == 10.0);
  CHECK(file.pose_rate_hz == 30.0);
  CHECK(file.vehicle.inertia == builtin.vehicle.inertia);
  CHECK(file.gains.gain_position_error == builtin.gains.gain_position_error);
  CHECK(file.gains.gain_body_rate == builtin.gains.gain_body_rate);
  CHECK(file.limits.v_max == 1.0);
  CHECK(file.limits.yaw_rate_max == 1.0);
  CHECK(file.limits.command_timeout == builtin.limits.command_timeout);
  CHECK(file.viewer_offset_m == std::array<double, 3>{5, 0, 0});
  CHECK(file.camera.width == 96);
  CHECK(file.camera.height == 54);
  CHECK(file.voxel_size == 0.1);
  CHECK(std::filesystem::equivalent(file.world_path, kSource / "worlds" / "wall.world"));
}

TEST_CASE("config parsing") {
  const ServerConfig c = parse_config(
      "port = 9000\n"
      "v_max = 2.5  # faster\n"
      "inertia = 1,0,0, 0,2,0, 0,0,3\n"
      "camera_mount_rpy_deg = 0 0 90\n"
      "mapping_enabled = off\n"
      "world = maps/a.world\n",
      "/base");
  CHECK(c.port == 9000);
  CHECK(c.limits.v_max == 2.5);
  CHECK(c.vehicle.inertia(1, 1) == 2.0);
  CHECK(c.camera.mount.rotation.col(0).isApprox(Eigen::Vector3d(0, 1, 0)));
  CHECK_FALSE(c.mapping_enabled);
  CHECK(c.world_path == std::filesystem::path("/base/maps/a.world"));

  CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("v_max = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("v_max = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("pose_rate_hz = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("port = 70000\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("torque_max = 1 2\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent.conf"), ConfigError);
}

TEST_CASE("script parsing") {
  const auto events = parse_script(
      "# mission\n"
      "4 cmd_vel 1 0 0 0.5\n"
      "0 takeoff\n"
      "  \n"
      "9.5 land\n"
      "2 mapping off\n");
  REQUIRE(events.size() == 4);
  CHECK(events[0].kind == ScriptEvent::Kind::Takeoff);
  CHECK(events[1].kind == ScriptEvent::Kind::MappingOff);
  CHECK(events[2].kind == ScriptEvent::Kind::CmdVel);
  CHECK(events[2].cmd.yaw_rate == 0.5);
  CHECK(events[3].time == 9.5);

  CHECK_THROWS_AS(parse_script("1 hover\n"), ScriptError);
  CHECK_THROWS_AS(parse_script("1 cmd_vel 1 2\n"), ScriptError);
  CHECK_THROWS_AS(parse_script("-1 takeoff\n"), ScriptError);
  CHECK_THROWS_AS(parse_script("soon takeoff\n"), ScriptError);
  CHECK_THROWS_AS(parse_script("1 takeoff now\n"), ScriptError);
  CHECK_THROWS_AS(parse_script("1 mapping maybe\n"), ScriptError);
}

TEST_CASE("shipped scripts parse") {
  CHECK(load_script(kSource / "scripts" / "wall_mission.script").size() == 6);
  CHECK_FALSE(load_script(kSource / "scripts" / "wall_crash.script").empty());
  CHECK_FALSE(load_script(kSource / "scripts" / "wall_sweep.script").empty());
}

TEST_CASE("landed vehicle stays put and rejects velocity commands") {
  Simulation sim(ServerConfig{}, wall());
  for (int i = 0; i < 100; ++i) sim.tick();
  CHECK(sim.state().position.norm() == 0.0);
  CHECK(sim.mode() == control::FlightMode::Landed);
  CHECK(sim.command(control::PilotAction::Velocity, {1, 0, 0, 0}).reason == control::RejectReason::NotArmed);
  CHECK(sim.state().time == doctest::Approx(0.2));
  CHECK(sim.trajectory().size() == 101);
}

TEST_CASE("simulation schedules scans and poses at their rates") {
  Simulation sim(ServerConfig{}, wall());
  sim.command(control::PilotAction::Takeoff);  // a camera resting on the ground sees nothing
  int scans = 0, poses = 0;
  for (int i = 0; i < 500; ++i) {
    const auto r = sim.tick();
    scans += r.scanned;
    poses += r.pose_due;
  }
  CHECK(scans == 10);
  CHECK(poses == 30);
  CHECK(sim.map().chunk_count() > 0);

  Simulation quiet(ServerConfig{}, wall());
  quiet.set_mapping(false);
  for (int i = 0; i < 100; ++i) CHECK_FALSE(quiet.tick().scanned);
  CHECK(quiet.map().chunk_count() == 0);
}

TEST_CASE("takeoff climbs to hover altitude") {
  Simulation sim(ServerConfig{}, wall());
  REQUIRE(sim.command(control::PilotAction::Takeoff).accepted);
  CHECK(sim.command(control::PilotAction::Takeoff).reason == control::RejectReason::NotArmed);
  while (sim.state().time < 6.0) sim.tick();
  CHECK(sim.mode() == control::FlightMode::Flying);
  CHECK(sim.state().position.z() == doctest::Approx(1.0).epsilon(0.01));
  CHECK(sim.command(control::PilotAction::Takeoff).reason == control::RejectReason::NotArmed);
}

TEST_CASE("clamped velocity setpoints never exceed v_max") {
  Simulation sim(ServerConfig{}, wall());
  sim.command(control::PilotAction::Takeoff);
  while (sim.mode() != control::FlightMode::Flying) sim.tick();
  REQUIRE(sim.command(control::PilotAction::Velocity, {5.0, 0, 0, 0}).accepted);
  for (int i = 0; i < 200; ++i) sim.tick();
  CHECK(sim.max_setpoint_speed() == doctest::Approx(1.0));
  CHECK(sim.max_setpoint_speed() <= 1.0);
}

TEST_CASE("scripted runs are deterministic") {
  const auto events = load_script(kSource / "scripts" / "wall_mission.script");
  auto run = [&] {
    Simulation sim(ServerConfig{}, wall());
    ScriptRunner runner(sim, events);
    CHECK(runner.run());
    return sim.trajectory();
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].position == b[i].position);
    REQUIRE(a[i].attitude == b[i].attitude);
    REQUIRE(a[i].velocity == b[i].velocity);
  }
}

TEST_CASE("scripted mapping toggles") {
  Simulation sim(ServerConfig{}, wall());
  ScriptRunner runner(sim, parse_script("0 mapping off\n0.5 mapping on\n"), 1.0);
  int scans_off = 0, scans_on = 0;
  while (sim.state().time < 1.0) {
    const double t = sim.state().time;
    const auto r = runner.step();
    (t < 0.5 ? scans_off : scans_on) += r.scanned;
  }
  CHECK(scans_off == 0);
  CHECK(scans_on > 0);
}
