#pragma once

#include "dynamics/dynamics.hpp"

#include <optional>
#include <stdexcept>

namespace vrgcs::control {

using dynamics::Mat3;
using dynamics::Vec3;

struct Setpoint {
  Vec3 position_target = Vec3::Zero();
  Vec3 velocity_target = Vec3::Zero();
  Vec3 accel_feedforward = Vec3::Zero();
  Vec3 angular_velocity_target = Vec3::Zero();
  /// Desired horizontal heading (unit, xy). Absent: hold current heading.
  std::optional<Eigen::Vector2d> heading_target;
};

/// The outer loop applies gain_velocity_error to the velocity error and
/// gain_position_error to the position error.
struct GainSet {
  Mat3 gain_velocity_error = Vec3(5.0, 5.0, 6.0).asDiagonal();
  Mat3 gain_position_error = Vec3(8.0, 8.0, 10.0).asDiagonal();
  Mat3 gain_attitude = Vec3(4.0, 4.0, 1.5).asDiagonal();
  Mat3 gain_body_rate = Vec3(0.8, 0.8, 0.4).asDiagonal();

  void validate() const;
};

/// Fallback memory for the degenerate cases of the attitude construction.
struct ControllerMemory {
  Mat3 last_desired_frame = Mat3::Identity();
  std::optional<Vec3> last_heading;
};

struct DegenerateError : std::domain_error {
  using std::domain_error::domain_error;
};
struct DegenerateHeadingError : DegenerateError {
  using DegenerateError::DegenerateError;
};
struct DegenerateForceError : DegenerateError {
  using DegenerateError::DegenerateError;
};
struct DegenerateCrossError : DegenerateError {
  using DegenerateError::DegenerateError;
};

inline constexpr double kHeadingEpsilon = 1e-6;
inline constexpr double kForceEpsilon = 1e-6;

Vec3 desired_force(const dynamics::VehicleState& state, const Setpoint& sp, const GainSet& gains,
                   const dynamics::VehicleParams& params);

/// Projection of the desired force on the current thrust axis, clamped to
/// [0, thrust_max].
double desired_thrust(const Vec3& force, const Mat3& attitude, double thrust_max);

/// Normalized horizontal projection of the body forward axis.
Vec3 heading_vector(const Mat3& attitude, double eps = kHeadingEpsilon);

Mat3 desired_frame(const Vec3& force, const Vec3& heading, double eps = kForceEpsilon);

/// Inverse of dynamics::hat. Throws std::invalid_argument for a non-skew input.
Vec3 vee(const Mat3& m);

Vec3 attitude_error(const Mat3& attitude, const Mat3& desired);

Vec3 desired_torque(const Vec3& attitude_err, const Vec3& body_rates, const Setpoint& sp,
                    const GainSet& gains, const Vec3& torque_max);

/// Full cascade. Degenerate force or heading reuse the values held in memory;
/// memory is updated in place.
dynamics::ControlInput control_step(const dynamics::VehicleState& state, const Setpoint& sp,
                                    const GainSet& gains, const dynamics::VehicleParams& params,
                                    ControllerMemory& memory);

}  // namespace vrgcs::control
