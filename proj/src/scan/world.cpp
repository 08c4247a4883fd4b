#include "scan/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace vrgcs::scan {

WorldError::WorldError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

namespace {

bool inside(const Box& outer, const Vec3& p) {
  return (p.array() >= outer.min.array()).all() && (p.array() <= outer.max.array()).all();
}

void check_box(const Box& box, const Box& bounds, int line) {
  if (!box.min.allFinite() || !box.max.allFinite()) throw WorldError("non-finite box corner", line);
  if (!(box.min.array() < box.max.array()).all())
    throw WorldError("box min corner must be below max corner on every axis", line);
  if (!inside(bounds, box.min) || !inside(bounds, box.max))
    throw WorldError("box lies outside the world bounds", line);
}

void check_triangle(const Triangle& tri, const Box& bounds, int line) {
  for (const Vec3& c : tri.corners) {
    if (!c.allFinite()) throw WorldError("non-finite triangle corner", line);
    if (!inside(bounds, c)) throw WorldError("triangle lies outside the world bounds", line);
  }
  const Vec3 n = (tri.corners[1] - tri.corners[0]).cross(tri.corners[2] - tri.corners[0]);
  if (n.norm() < 1e-12) throw WorldError("degenerate triangle", line);
}

Vec3 closest_on_triangle(const Vec3& p, const Triangle& tri) {
  const Vec3& a = tri.corners[0];
  const Vec3& b = tri.corners[1];
  const Vec3& c = tri.corners[2];
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + d1 / (d1 - d3) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + d2 / (d2 - d6) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

double box_exterior_distance(const Box& box, const Vec3& p) {
  const Vec3 d = (box.min - p).cwiseMax(p - box.max).cwiseMax(Vec3::Zero());
  return d.norm();
}

double box_surface_distance(const Box& box, const Vec3& p) {
  if (!inside(box, p)) return box_exterior_distance(box, p);
  return std::min((p - box.min).minCoeff(), (box.max - p).minCoeff());
}

std::optional<double> intersect_box(const Box& box, const Vec3& o, const Vec3& d) {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    if (d[axis] == 0.0) {
      if (o[axis] < box.min[axis] || o[axis] > box.max[axis]) return std::nullopt;
      continue;
    }
    double t0 = (box.min[axis] - o[axis]) / d[axis];
    double t1 = (box.max[axis] - o[axis]) / d[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  if (t_far < 0.0) return std::nullopt;
  return t_near >= 0.0 ? t_near : t_far;
}

std::optional<double> intersect_triangle(const Triangle& tri, const Vec3& o, const Vec3& d) {
  const Vec3 e1 = tri.corners[1] - tri.corners[0];
  const Vec3 e2 = tri.corners[2] - tri.corners[0];
  const Vec3 pvec = d.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) < 1e-14) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 tvec = o - tri.corners[0];
  const double u = tvec.dot(pvec) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 qvec = tvec.cross(e1);
  const double v = d.dot(qvec) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(qvec) * inv;
  if (t < 0.0) return std::nullopt;
  return t;
}

}  // namespace

void WorldModel::validate() const {
  if (!(bounds.min.array() < bounds.max.array()).all()) throw WorldError("empty world bounds");
  for (const Box& b : boxes) check_box(b, bounds, 0);
  for (const Triangle& t : triangles) check_triangle(t, bounds, 0);
}

WorldModel parse_world(const std::string& text, const std::string& name) {
  WorldModel world;
  world.name = name;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::vector<std::pair<Box, int>> boxes;
  std::vector<std::pair<Triangle, int>> triangles;

  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream fields(raw);
    std::string keyword;
    if (!(fields >> keyword)) continue;

    auto read_values = [&](std::size_t count) {
      std::vector<double> values(count);
      for (double& v : values) {
        if (!(fields >> v)) throw WorldError("expected " + std::to_string(count) +
                                                 " numbers after '" + keyword + "'",
                                             line_no);
      }
      std::string extra;
      if (fields >> extra) throw WorldError("unexpected token '" + extra + "'", line_no);
      return values;
    };

    if (keyword == "box" || keyword == "bounds") {
      const auto v = read_values(6);
      Box box{Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5])};
      if (keyword == "bounds") {
        if (!(box.min.array() < box.max.array()).all())
          throw WorldError("bounds min corner must be below max corner", line_no);
        world.bounds = box;
      } else {
        boxes.emplace_back(box, line_no);
      }
    } else if (keyword == "tri") {
      const auto v = read_values(9);
      triangles.push_back({Triangle{{Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5]),
                                     Vec3(v[6], v[7], v[8])}},
                           line_no});
    } else {
      throw WorldError("unknown keyword '" + keyword + "'", line_no);
    }
  }

  // Bounds may appear anywhere in the file, so validate once parsing is done.
  for (const auto& [box, line] : boxes) {
    check_box(box, world.bounds, line);
    world.boxes.push_back(box);
  }
  for (const auto& [tri, line] : triangles) {
    check_triangle(tri, world.bounds, line);
    world.triangles.push_back(tri);
  }
  return world;
}

WorldModel load_world(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw WorldError("cannot open world file " + path.string());
  std::ostringstream text;
  text << file.rdbuf();
  return parse_world(text.str(), path.stem().string());
}

std::optional<double> intersect(const WorldModel& world, const Vec3& origin,
                                const Vec3& direction) {
  std::optional<double> best;
  auto consider = [&](std::optional<double> t) {
    if (t && (!best || *t < *best)) best = t;
  };
  if (direction.z() != 0.0) {
    const double t = -origin.z() / direction.z();
    if (t >= 0.0) consider(t);
  }
  for (const Box& b : world.boxes) consider(intersect_box(b, origin, direction));
  for (const Triangle& tri : world.triangles) consider(intersect_triangle(tri, origin, direction));
  return best;
}

double obstacle_distance(const WorldModel& world, const Vec3& point) {
  double best = std::numeric_limits<double>::infinity();
  for (const Box& b : world.boxes) best = std::min(best, box_exterior_distance(b, point));
  for (const Triangle& t : world.triangles)
    best = std::min(best, (closest_on_triangle(point, t) - point).norm());
  return best;
}

double surface_distance(const WorldModel& world, const Vec3& point) {
  double best = std::abs(point.z());
  for (const Box& b : world.boxes) best = std::min(best, box_surface_distance(b, point));
  for (const Triangle& t : world.triangles)
    best = std::min(best, (closest_on_triangle(point, t) - point).norm());
  return best;
}

}  // namespace vrgcs::scan
