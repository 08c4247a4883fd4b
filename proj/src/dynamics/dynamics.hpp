#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace vrgcs::dynamics {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid-body state of the vehicle. Attitude maps body to world; its columns
/// are the body axes c1 (forward), c2, c3 (thrust) expressed in world frame.
struct VehicleState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Mat3 attitude = Mat3::Identity();
  Vec3 body_rates = Vec3::Zero();
  double time = 0.0;

  bool finite() const;
};

struct VehicleParams {
  double mass = 2.0;
  Mat3 inertia = Eigen::Vector3d(0.02, 0.02, 0.04).asDiagonal();
  double gravity = 9.81;
  double thrust_max = 60.0;
  Vec3 torque_max = Vec3(2.0, 2.0, 1.0);

  /// Throws std::invalid_argument naming the violated invariant.
  void validate() const;
};

struct ControlInput {
  double thrust = 0.0;
  Vec3 torque = Vec3::Zero();
};

class SingularAttitudeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

/// 3-2-1 kinematics: body rates (p, q, r) from Euler angle rates.
/// Throws SingularAttitudeError when |pitch| >= pi/2 - 1e-6.
Vec3 euler_rates_to_body_rates(const EulerAngles& euler, const Vec3& euler_rates);

/// Rz(yaw) * Ry(pitch) * Rx(roll), body to world.
Mat3 rotation_from_euler(double roll, double pitch, double yaw);
EulerAngles euler_from_rotation(const Mat3& attitude);

Mat3 hat(const Vec3& v);

/// Nearest rotation matrix (polar factor) to an almost-orthogonal matrix.
Mat3 orthonormalize(const Mat3& m);

Vec3 translational_accel(const VehicleState& state, const ControlInput& input,
                         const VehicleParams& params);

/// J^-1 (T - Omega x J Omega), body frame.
Vec3 angular_accel(const VehicleState& state, const ControlInput& input,
                   const VehicleParams& params);

/// One classical RK4 step over (r, v, S, Omega) with S' = S hat(Omega).
/// Requires 0 < dt <= 0.01; throws std::invalid_argument otherwise or when the
/// state is not finite.
VehicleState step(const VehicleState& state, const ControlInput& input,
                  const VehicleParams& params, double dt);

}  // namespace vrgcs::dynamics
