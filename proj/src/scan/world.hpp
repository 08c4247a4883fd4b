#pragma once

#include <Eigen/Dense>

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vrgcs::scan {

using Vec3 = Eigen::Vector3d;

struct Box {
  Vec3 min;
  Vec3 max;
};

struct Triangle {
  std::array<Vec3, 3> corners;
};

/// Static environment: axis-aligned boxes, free triangles and the implicit
/// ground plane z = 0.
struct WorldModel {
  std::string name;
  std::vector<Box> boxes;
  std::vector<Triangle> triangles;
  Box bounds{Vec3(-100.0, -100.0, -1.0), Vec3(100.0, 100.0, 50.0)};

  void validate() const;
};

class WorldError : public std::runtime_error {
 public:
  WorldError(const std::string& what, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

/// Parses the line-oriented world format:
///   box x0 y0 z0 x1 y1 z1
///   tri x0 y0 z0 x1 y1 z1 x2 y2 z2
///   bounds x0 y0 z0 x1 y1 z1
/// with '#' comments. Errors carry the 1-based line number.
WorldModel parse_world(const std::string& text, const std::string& name = "world");
WorldModel load_world(const std::filesystem::path& path);

/// Nearest hit distance along a unit-direction ray, ground plane included.
std::optional<double> intersect(const WorldModel& world, const Vec3& origin, const Vec3& direction);

/// Distance from a point to the nearest obstacle surface (boxes and
/// triangles, ground excluded).
double obstacle_distance(const WorldModel& world, const Vec3& point);

/// Distance from a point to the nearest surface, ground plane included.
double surface_distance(const WorldModel& world, const Vec3& point);

}  // namespace vrgcs::scan
