#pragma once

#include "scan/world.hpp"

#include <limits>
#include <vector>

namespace vrgcs::scan {

using Mat3 = Eigen::Matrix3d;

/// Rigid pose; rotation maps the local frame (x forward, y left, z up) to world.
struct Pose {
  Vec3 position = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();

  Pose compose(const Pose& local) const {
    return {position + rotation * local.position, rotation * local.rotation};
  }
};

struct DepthCameraSpec {
  double horizontal_fov_deg = 110.0;
  double vertical_fov_deg = 80.0;
  double min_range = 0.1;
  double max_range = 8.0;
  int width = 96;
  int height = 54;
  Pose mount;

  void validate() const;

  /// Unit ray direction in the camera frame for pixel (col, row); row 0 is
  /// the top of the image, col 0 the left edge.
  Vec3 ray_direction(int col, int row) const;
};

inline constexpr double kNoReturn = std::numeric_limits<double>::infinity();

struct DepthImage {
  DepthCameraSpec spec;
  std::vector<double> depths;  // row-major, kNoReturn for no return
  Pose camera_pose;
  double timestamp = 0.0;

  double at(int col, int row) const { return depths[static_cast<std::size_t>(row) * spec.width + col]; }
  static bool valid(double depth) { return depth != kNoReturn; }
};

DepthImage render_depth(const WorldModel& world, const Pose& camera_pose,
                        const DepthCameraSpec& spec, double timestamp = 0.0);

}  // namespace vrgcs::scan
