#include "control/controller.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace vrgcs;
using namespace vrgcs::control;
using dynamics::VehicleParams;
using dynamics::VehicleState;

namespace {

VehicleParams unit_mass() {
  VehicleParams p;
  p.mass = 1.0;
  return p;
}

}  // namespace

TEST_CASE("desired force examples") {
  const VehicleParams p = unit_mass();
  GainSet g;
  VehicleState s;
  Setpoint sp;
  CHECK(desired_force(s, sp, g, p).isApprox(Vec3(0, 0, 9.81)));

  g.gain_position_error = Mat3::Identity();
  g.gain_velocity_error = Mat3::Identity();
  s.position = Vec3(1, 0, 0);
  CHECK(desired_force(s, sp, g, p).isApprox(Vec3(-1, 0, 9.81)));

  VehicleParams heavy;
  heavy.mass = 2.0;
  VehicleState at_target;
  Setpoint ff;
  ff.accel_feedforward = Vec3(0, 0, 1);
  CHECK(desired_force(at_target, ff, GainSet{}, heavy).isApprox(Vec3(0, 0, 2 * 9.81 + 2)));
}

TEST_CASE("desired force applies the velocity gain to the velocity error") {
  GainSet g;
  g.gain_position_error = Mat3::Zero();
  g.gain_velocity_error = Vec3(2, 3, 4).asDiagonal();
  VehicleState s;
  s.velocity = Vec3(1, 1, 1);
  const Vec3 f = desired_force(s, {}, g, unit_mass());
  CHECK(f.isApprox(Vec3(-2, -3, 9.81 - 4)));
}

TEST_CASE("desired thrust projection and clamp") {
  CHECK(desired_thrust(Vec3(0, 0, 19.62), Mat3::Identity(), 60) == doctest::Approx(19.62));
  CHECK(desired_thrust(Vec3(5, 0, 0), Mat3::Identity(), 60) == 0.0);
  CHECK(desired_thrust(Vec3(0, 0, -5), Mat3::Identity(), 60) == 0.0);
  CHECK(desired_thrust(Vec3(0, 0, 100), Mat3::Identity(), 60) == 60.0);
  const Mat3 rolled = dynamics::rotation_from_euler(std::numbers::pi / 3, 0, 0);
  CHECK(desired_thrust(Vec3(0, 0, 19.62), rolled, 60) == doctest::Approx(9.81).epsilon(1e-14));
}

TEST_CASE("heading vector examples") {
  auto with_c1 = [](const Vec3& c1) {
    // Any frame whose first column is c1.
    const Vec3 a = c1.normalized();
    const Vec3 helper = std::abs(a.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
    const Vec3 b = helper.cross(a).normalized();
    Mat3 m;
    m << a, b, a.cross(b);
    return m;
  };
  CHECK((heading_vector(Mat3::Identity()) - Vec3(1, 0, 0)).norm() < 1e-15);
  const Vec3 diag = Vec3(1, 1, 0) / std::sqrt(2.0);
  CHECK((heading_vector(with_c1(diag)) - diag).norm() < 1e-15);
  CHECK((heading_vector(with_c1(Vec3(0.6, 0, 0.8))) - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(heading_vector(with_c1(Vec3(0, 0, 1))), DegenerateHeadingError);
}

TEST_CASE("desired frame examples") {
  CHECK((desired_frame(Vec3(0, 0, 19.62), Vec3(1, 0, 0)) - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  const Mat3 s = desired_frame(Vec3(0, 0, 19.62), Vec3(0, 1, 0));
  CHECK((s.col(0) - Vec3(0, 1, 0)).norm() < 1e-15);
  CHECK((s.col(1) - Vec3(-1, 0, 0)).norm() < 1e-15);
  CHECK((s.col(2) - Vec3(0, 0, 1)).norm() < 1e-15);
  CHECK_THROWS_AS(desired_frame(Vec3(0, 0, 1e-9), Vec3(1, 0, 0)), DegenerateForceError);
  CHECK_THROWS_AS(desired_frame(Vec3(0, 0, 1e-9), Vec3(1, 0, 0)), DegenerateError);
  // Force horizontal and parallel to the heading's normal: (e3 x h) x c3 vanishes.
  CHECK_THROWS_AS(desired_frame(Vec3(0, 5, 0), Vec3(1, 0, 0)), DegenerateCrossError);
}

TEST_CASE("desired frame properties over random inputs") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  double ortho = 0.0, det = 0.0, scale_dev = 0.0, level = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double psi = ang(rng);
    const Vec3 h(std::cos(psi), std::sin(psi), 0.0);
    Vec3 f(n(rng), n(rng), std::abs(n(rng)) + 0.5);
    const Mat3 s = desired_frame(f, h);
    ortho = std::max(ortho, (s.transpose() * s - Mat3::Identity()).cwiseAbs().maxCoeff());
    det = std::max(det, std::abs(s.determinant() - 1.0));
    scale_dev = std::max(scale_dev, (desired_frame(scale(rng) * f, h) - s).cwiseAbs().maxCoeff());
    const Mat3 hover = desired_frame(Vec3(0, 0, scale(rng)), h);
    level = std::max(level, (hover.col(0) - h).norm());
  }
  CHECK(ortho <= 1e-12);
  CHECK(det <= 1e-12);
  CHECK(scale_dev <= 1e-12);
  CHECK(level <= 1e-12);
}

TEST_CASE("vee examples and inverse property") {
  Mat3 m;
  m << 0, 1, 2, -1, 0, 3, -2, -3, 0;
  CHECK(vee(m) == Vec3(-3, 2, -1));
  CHECK(vee(Mat3::Zero()) == Vec3::Zero());
  Mat3 bad = m;
  bad(0, 1) = 5;
  CHECK_THROWS_AS(vee(bad), std::invalid_argument);
  Mat3 diag = Mat3::Zero();
  diag(1, 1) = 1;
  CHECK_THROWS_AS(vee(diag), std::invalid_argument);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v(u(rng), u(rng), u(rng));
    REQUIRE(vee(dynamics::hat(v)) == v);
    Mat3 k;
    const double a = u(rng), b = u(rng), c = u(rng);
    k << 0, a, b, -a, 0, c, -b, -c, 0;
    REQUIRE(dynamics::hat(vee(k)) == k);
  }
}

TEST_CASE("attitude error examples") {
  const Mat3 s = dynamics::rotation_from_euler(0.2, -0.1, 0.7);
  CHECK(attitude_error(s, s).norm() < 1e-15);
  for (double alpha : {1e-3, 0.05, 0.3}) {
    const Vec3 e = attitude_error(dynamics::rotation_from_euler(0, 0, alpha), Mat3::Identity());
    CHECK(e.x() == doctest::Approx(0.0));
    CHECK(e.y() == doctest::Approx(0.0));
    CHECK(e.z() == doctest::Approx(std::sin(alpha)).epsilon(1e-14));
  }
}

TEST_CASE("attitude error matches the quaternion oracle and is antisymmetric") {
  std::mt19937_64 rng(17);
  double worst = 0.0, anti = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Mat3 s = oracle::random_rotation(rng);
    const Mat3 d = oracle::random_rotation(rng);
    worst = std::max(worst, (attitude_error(s, d) - oracle::quaternion_attitude_error(s, d)).cwiseAbs().maxCoeff());
    anti = std::max(anti, (attitude_error(s, d) + attitude_error(d, s)).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-12);
  CHECK(anti <= 1e-15);
}

TEST_CASE("desired torque") {
  GainSet g;
  const Vec3 limit(2, 2, 1);
  CHECK(desired_torque(Vec3::Zero(), Vec3(0.1, 0.2, 0.3), Setpoint{.angular_velocity_target = Vec3(0.1, 0.2, 0.3)},
                       g, limit)
            .norm() == 0.0);
  g.gain_attitude = Mat3::Identity();
  g.gain_body_rate = Mat3::Zero();
  CHECK(desired_torque(Vec3(0.1, 0, 0), Vec3::Zero(), {}, g, limit).isApprox(Vec3(-0.1, 0, 0)));
  g.gain_attitude = 100 * Mat3::Identity();
  CHECK(desired_torque(Vec3(0.1, -0.1, 0.1), Vec3::Zero(), {}, g, limit) == Vec3(-2, 2, -1));
}

TEST_CASE("control step at the hover setpoint") {
  const VehicleParams p;
  ControllerMemory mem;
  VehicleState s;
  s.position = Vec3(0.5, -1, 2);
  Setpoint sp;
  sp.position_target = s.position;
  const auto u = control_step(s, sp, GainSet{}, p, mem);
  CHECK(u.thrust == doctest::Approx(p.mass * p.gravity).epsilon(1e-15));
  CHECK(u.torque.norm() < 1e-15);
}

TEST_CASE("control step falls back on degenerate force") {
  const VehicleParams p;
  ControllerMemory mem;
  VehicleState s;
  Setpoint sp;
  sp.accel_feedforward = Vec3(0, 0, -p.gravity);  // F_des = 0
  auto u = control_step(s, sp, GainSet{}, p, mem);
  CHECK(u.thrust == 0.0);
  CHECK(mem.last_desired_frame == Mat3::Identity());

  const Mat3 tilted = dynamics::rotation_from_euler(0.1, 0, 0.4);
  mem.last_desired_frame = tilted;
  u = control_step(s, sp, GainSet{}, p, mem);
  CHECK(mem.last_desired_frame == tilted);
  CHECK(u.torque.allFinite());
  CHECK(u.torque.norm() > 0.0);
}

TEST_CASE("control step reuses the last heading when the nose points vertical") {
  const VehicleParams p;
  ControllerMemory mem;
  mem.last_heading = Vec3(0, 1, 0);
  VehicleState s;
  s.attitude = dynamics::rotation_from_euler(0, -std::numbers::pi / 2, 0);
  Setpoint sp;
  const auto u = control_step(s, sp, GainSet{}, p, mem);
  CHECK(u.torque.allFinite());
  CHECK((mem.last_desired_frame.col(0) - Vec3(0, 1, 0)).norm() < 1e-12);
}

TEST_CASE("closed-loop hover is an equilibrium") {
  const VehicleParams p;
  ControllerMemory mem;
  VehicleState s;
  s.position = Vec3(1, 2, 1);
  Setpoint sp;
  sp.position_target = s.position;
  const VehicleState start = s;
  double drift = 0.0;
  for (int i = 0; i < 5000; ++i) {
    s = dynamics::step(s, control_step(s, sp, GainSet{}, p, mem), p, 2e-3);
    drift = std::max({drift, (s.position - start.position).norm(), s.velocity.norm(),
                      (s.attitude - start.attitude).cwiseAbs().maxCoeff(), s.body_rates.norm()});
  }
  CHECK(drift < 1e-6);
}

TEST_CASE("closed loop under random setpoints stays finite and within actuator limits") {
  const VehicleParams p;
  ControllerMemory mem;
  VehicleState s;
  s.position = Vec3(0, 0, 1);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> pos(-2, 2), vel(-1, 1), yaw(-3, 3);
  Setpoint sp;
  for (int i = 0; i < 30000; ++i) {
    if (i % 500 == 0) {
      sp.position_target = Vec3(pos(rng), pos(rng), 1 + pos(rng) / 2);
      sp.velocity_target = Vec3(vel(rng), vel(rng), vel(rng));
      const double psi = yaw(rng);
      sp.heading_target = Eigen::Vector2d(std::cos(psi), std::sin(psi));
    }
    const auto u = control_step(s, sp, GainSet{}, p, mem);
    REQUIRE(u.thrust >= 0.0);
    REQUIRE(u.thrust <= p.thrust_max);
    REQUIRE((u.torque.cwiseAbs().array() <= p.torque_max.array()).all());
    s = dynamics::step(s, u, p, 2e-3);
    REQUIRE(s.finite());
  }
}

TEST_CASE("gain and parameter validation") {
  GainSet g;
  CHECK_NOTHROW(g.validate());
  g.gain_attitude(0, 0) = -1;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  VehicleParams p;
  CHECK_NOTHROW(p.validate());
  p.mass = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
