#include "control/controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vrgcs::control {

namespace {

void require_positive_definite(const Mat3& m, const char* name) {
  if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument(std::string(name) + " must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> eig(m, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0))
    throw std::invalid_argument(std::string(name) + " must be positive definite");
}

void require_positive_diagonal(const Mat3& m, const char* name) {
  const Mat3 off = m - Mat3(m.diagonal().asDiagonal());
  if (off.cwiseAbs().maxCoeff() != 0.0 || !(m.diagonal().array() > 0.0).all())
    throw std::invalid_argument(std::string(name) + " must be diagonal with positive entries");
}

}  // namespace

void GainSet::validate() const {
  require_positive_definite(gain_velocity_error, "gain_velocity_error");
  require_positive_definite(gain_position_error, "gain_position_error");
  require_positive_diagonal(gain_attitude, "gain_attitude");
  require_positive_diagonal(gain_body_rate, "gain_body_rate");
}

Vec3 desired_force(const dynamics::VehicleState& state, const Setpoint& sp, const GainSet& gains,
                   const dynamics::VehicleParams& params) {
  return -gains.gain_velocity_error * (state.velocity - sp.velocity_target) -
         gains.gain_position_error * (state.position - sp.position_target) +
         params.mass * params.gravity * Vec3::UnitZ() + params.mass * sp.accel_feedforward;
}

double desired_thrust(const Vec3& force, const Mat3& attitude, double thrust_max) {
  return std::clamp(force.dot(attitude.col(2)), 0.0, thrust_max);
}

Vec3 heading_vector(const Mat3& attitude, double eps) {
  const Vec3 forward = attitude.col(0);
  const Vec3 horizontal(forward.x(), forward.y(), 0.0);
  const double norm = horizontal.norm();
  if (!(norm >= eps)) throw DegenerateHeadingError("body forward axis is vertical");
  return horizontal / norm;
}

Mat3 desired_frame(const Vec3& force, const Vec3& heading, double eps) {
  const double force_norm = force.norm();
  if (!(force_norm >= eps)) throw DegenerateForceError("desired force vanishes");
  const Vec3 c3 = force / force_norm;
  const Vec3 cross = Vec3::UnitZ().cross(heading).cross(c3);
  const double cross_norm = cross.norm();
  if (!(cross_norm >= eps)) throw DegenerateCrossError("heading is parallel to desired thrust");
  const Vec3 c1 = cross / cross_norm;
  Mat3 frame;
  frame.col(0) = c1;
  frame.col(1) = c3.cross(c1);
  frame.col(2) = c3;
  return frame;
}

Vec3 vee(const Mat3& m) {
  if (!((m + m.transpose()).cwiseAbs().maxCoeff() <= 1e-9))
    throw std::invalid_argument("vee requires a skew-symmetric matrix");
  // [[0,a,b],[-a,0,c],[-b,-c,0]] -> (-c, b, -a)
  return Vec3(-m(1, 2), m(0, 2), -m(0, 1));
}

Vec3 attitude_error(const Mat3& attitude, const Mat3& desired) {
  const Mat3 skew = desired.transpose() * attitude - attitude.transpose() * desired;
  return 0.5 * vee(skew);
}

Vec3 desired_torque(const Vec3& attitude_err, const Vec3& body_rates, const Setpoint& sp,
                    const GainSet& gains, const Vec3& torque_max) {
  const Vec3 rate_err = body_rates - sp.angular_velocity_target;
  const Vec3 torque = -gains.gain_attitude * attitude_err - gains.gain_body_rate * rate_err;
  return torque.cwiseMax(-torque_max).cwiseMin(torque_max);
}

dynamics::ControlInput control_step(const dynamics::VehicleState& state, const Setpoint& sp,
                                    const GainSet& gains, const dynamics::VehicleParams& params,
                                    ControllerMemory& memory) {
  const Vec3 force = desired_force(state, sp, gains, params);
  const double thrust = desired_thrust(force, state.attitude, params.thrust_max);

  Vec3 heading;
  if (sp.heading_target) {
    heading = Vec3(sp.heading_target->x(), sp.heading_target->y(), 0.0);
    memory.last_heading = heading;
  } else {
    try {
      heading = heading_vector(state.attitude);
      memory.last_heading = heading;
    } catch (const DegenerateHeadingError&) {
      heading = memory.last_heading.value_or(Vec3::UnitX());
    }
  }

  Mat3 frame;
  try {
    frame = desired_frame(force, heading);
    memory.last_desired_frame = frame;
  } catch (const DegenerateError&) {
    frame = memory.last_desired_frame;
  }

  const Vec3 err = attitude_error(state.attitude, frame);
  return {thrust, desired_torque(err, state.body_rates, sp, gains, params.torque_max)};
}

}  // namespace vrgcs::control
