#include "scan/depth_camera.hpp"

#include <cmath>
#include <numbers>

namespace vrgcs::scan {

void DepthCameraSpec::validate() const {
  if (!(min_range > 0.0 && min_range < max_range))
    throw std::invalid_argument("camera range must satisfy 0 < min_range < max_range");
  if (!(horizontal_fov_deg > 0.0 && horizontal_fov_deg < 180.0) ||
      !(vertical_fov_deg > 0.0 && vertical_fov_deg < 180.0))
    throw std::invalid_argument("camera fields of view must lie in (0, 180) degrees");
  if (width <= 0 || height <= 0) throw std::invalid_argument("camera ray grid must be non-empty");
}

Vec3 DepthCameraSpec::ray_direction(int col, int row) const {
  const double deg = std::numbers::pi / 180.0;
  const double u = (col + 0.5) / width * 2.0 - 1.0;
  const double v = (row + 0.5) / height * 2.0 - 1.0;
  return Vec3(1.0, -u * std::tan(horizontal_fov_deg * deg / 2.0),
              -v * std::tan(vertical_fov_deg * deg / 2.0))
      .normalized();
}

DepthImage render_depth(const WorldModel& world, const Pose& camera_pose,
                        const DepthCameraSpec& spec, double timestamp) {
  DepthImage image;
  image.spec = spec;
  image.camera_pose = camera_pose;
  image.timestamp = timestamp;
  image.depths.assign(static_cast<std::size_t>(spec.width) * spec.height, kNoReturn);

  for (int row = 0; row < spec.height; ++row) {
    for (int col = 0; col < spec.width; ++col) {
      const Vec3 dir = camera_pose.rotation * spec.ray_direction(col, row);
      const auto hit = intersect(world, camera_pose.position, dir);
      if (hit && *hit >= spec.min_range && *hit <= spec.max_range)
        image.depths[static_cast<std::size_t>(row) * spec.width + col] = *hit;
    }
  }
  return image;
}

}  // namespace vrgcs::scan
