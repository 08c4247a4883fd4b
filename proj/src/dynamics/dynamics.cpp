#include "dynamics/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace vrgcs::dynamics {

bool VehicleState::finite() const {
  return position.allFinite() && velocity.allFinite() && attitude.allFinite() &&
         body_rates.allFinite() && std::isfinite(time);
}

void VehicleParams::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("vehicle mass must be positive");
  if (!(gravity > 0.0)) throw std::invalid_argument("gravity must be positive");
  if (!inertia.allFinite() || (inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("inertia must be a finite symmetric matrix");
  Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0))
    throw std::invalid_argument("inertia must be positive definite");
  if (!(thrust_max > mass * gravity))
    throw std::invalid_argument("thrust_max must exceed mass*gravity so hover is feasible");
  if (!(torque_max.array() > 0.0).all())
    throw std::invalid_argument("torque_max components must be positive");
}

Vec3 euler_rates_to_body_rates(const EulerAngles& euler, const Vec3& euler_rates) {
  constexpr double kLimit = std::numbers::pi / 2.0 - 1e-6;
  if (!(std::abs(euler.pitch) < kLimit))
    throw SingularAttitudeError("pitch at gimbal lock: " + std::to_string(euler.pitch));
  const double sphi = std::sin(euler.roll), cphi = std::cos(euler.roll);
  const double sth = std::sin(euler.pitch), cth = std::cos(euler.pitch);
  Mat3 w;
  w << 1.0, 0.0, -sth,
       0.0, cphi, sphi * cth,
       0.0, -sphi, cphi * cth;
  return w * euler_rates;
}

Mat3 rotation_from_euler(double roll, double pitch, double yaw) {
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
          Eigen::AngleAxisd(roll, Vec3::UnitX()))
      .toRotationMatrix();
}

EulerAngles euler_from_rotation(const Mat3& s) {
  EulerAngles e;
  e.pitch = -std::asin(std::clamp(s(2, 0), -1.0, 1.0));
  e.roll = std::atan2(s(2, 1), s(2, 2));
  e.yaw = std::atan2(s(1, 0), s(0, 0));
  return e;
}

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Mat3 orthonormalize(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
  return u * v.transpose();
}

Vec3 translational_accel(const VehicleState& state, const ControlInput& input,
                         const VehicleParams& params) {
  const Vec3 force = -params.mass * params.gravity * Vec3::UnitZ() +
                     input.thrust * state.attitude.col(2);
  return force / params.mass;
}

Vec3 angular_accel(const VehicleState& state, const ControlInput& input,
                   const VehicleParams& params) {
  const Vec3& omega = state.body_rates;
  return params.inertia.ldlt().solve(input.torque - omega.cross(params.inertia * omega));
}

namespace {

struct Derivative {
  Vec3 position;
  Vec3 velocity;
  Mat3 attitude;
  Vec3 body_rates;
};

Derivative derivative(const VehicleState& s, const ControlInput& input,
                      const VehicleParams& params) {
  return {s.velocity, translational_accel(s, input, params), s.attitude * hat(s.body_rates),
          angular_accel(s, input, params)};
}

VehicleState advance(const VehicleState& s, const Derivative& d, double h) {
  VehicleState out = s;
  out.position += h * d.position;
  out.velocity += h * d.velocity;
  out.attitude += h * d.attitude;
  out.body_rates += h * d.body_rates;
  return out;
}

}  // namespace

VehicleState step(const VehicleState& state, const ControlInput& input,
                  const VehicleParams& params, double dt) {
  if (!(dt > 0.0 && dt <= 0.01)) throw std::invalid_argument("step dt must be in (0, 0.01]");
  if (!state.finite()) throw std::invalid_argument("non-finite vehicle state");

  const Derivative k1 = derivative(state, input, params);
  const Derivative k2 = derivative(advance(state, k1, dt / 2), input, params);
  const Derivative k3 = derivative(advance(state, k2, dt / 2), input, params);
  const Derivative k4 = derivative(advance(state, k3, dt), input, params);

  VehicleState next = state;
  next.position += dt / 6.0 * (k1.position + 2.0 * k2.position + 2.0 * k3.position + k4.position);
  next.velocity += dt / 6.0 * (k1.velocity + 2.0 * k2.velocity + 2.0 * k3.velocity + k4.velocity);
  next.attitude += dt / 6.0 * (k1.attitude + 2.0 * k2.attitude + 2.0 * k3.attitude + k4.attitude);
  next.body_rates +=
      dt / 6.0 * (k1.body_rates + 2.0 * k2.body_rates + 2.0 * k3.body_rates + k4.body_rates);
  next.attitude = orthonormalize(next.attitude);
  next.time = state.time + dt;

  if (!next.finite()) throw std::invalid_argument("integration produced a non-finite state");
  return next;
}

}  // namespace vrgcs::dynamics
