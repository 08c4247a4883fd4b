#include "scan/voxel_map.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace vrgcs::scan {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::string describe(const ChunkCoord& c) {
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + "," + std::to_string(c.z) + ")";
}

}  // namespace

VoxelMap::VoxelMap(double voxel_size, std::uint32_t threshold)
    : voxel_size_(voxel_size), threshold_(threshold) {
  if (!(voxel_size > 0.0)) throw std::invalid_argument("voxel_size must be positive");
  if (threshold == 0) throw std::invalid_argument("occupancy threshold must be >= 1");
}

VoxelIndex VoxelMap::voxel_of(const Vec3& point) const {
  return (point / voxel_size_).array().floor().cast<int>();
}

ChunkCoord VoxelMap::chunk_of(const VoxelIndex& voxel) {
  return {floor_div(voxel.x(), kChunkEdge), floor_div(voxel.y(), kChunkEdge),
          floor_div(voxel.z(), kChunkEdge)};
}

int VoxelMap::local_offset(const VoxelIndex& voxel) {
  const ChunkCoord c = chunk_of(voxel);
  const int lx = voxel.x() - c.x * kChunkEdge;
  const int ly = voxel.y() - c.y * kChunkEdge;
  const int lz = voxel.z() - c.z * kChunkEdge;
  return (lz * kChunkEdge + ly) * kChunkEdge + lx;
}

std::set<ChunkCoord> VoxelMap::add_hit(const Vec3& point) {
  std::set<ChunkCoord> changed;
  if (!point.allFinite()) return changed;
  const VoxelIndex voxel = voxel_of(point);
  const ChunkCoord owner = chunk_of(voxel);
  Block& block = chunks_[owner];
  std::uint32_t& count = block.counters[local_offset(voxel)];
  const bool was_surface = count >= threshold_;
  if (count < std::numeric_limits<std::uint32_t>::max()) ++count;
  if (was_surface || count < threshold_) return changed;

  changed.insert(owner);
  for (int axis = 0; axis < 3; ++axis) {
    for (int step : {-1, 1}) {
      VoxelIndex n = voxel;
      n[axis] += step;
      const ChunkCoord nc = chunk_of(n);
      if (nc != owner && chunks_.count(nc)) changed.insert(nc);
    }
  }
  for (const ChunkCoord& c : changed) ++chunks_[c].revision;
  return changed;
}

std::uint32_t VoxelMap::counter(const VoxelIndex& voxel) const {
  auto it = chunks_.find(chunk_of(voxel));
  return it == chunks_.end() ? 0 : it->second.counters[local_offset(voxel)];
}

bool VoxelMap::occupied(const VoxelIndex& voxel) const { return counter(voxel) >= threshold_; }

std::uint32_t VoxelMap::revision(const ChunkCoord& coords) const {
  auto it = chunks_.find(coords);
  if (it == chunks_.end()) throw UnknownChunkError("unknown chunk " + describe(coords));
  return it->second.revision;
}

std::vector<std::pair<ChunkCoord, std::uint32_t>> VoxelMap::chunk_list() const {
  std::vector<std::pair<ChunkCoord, std::uint32_t>> out;
  out.reserve(chunks_.size());
  for (const auto& [coords, block] : chunks_) out.emplace_back(coords, block.revision);
  return out;
}

std::set<ChunkCoord> integrate_scan(VoxelMap& map, const DepthImage& image) {
  std::set<ChunkCoord> dirty;
  const Pose& pose = image.camera_pose;
  if (!pose.position.allFinite() || !pose.rotation.allFinite()) return dirty;
  for (int row = 0; row < image.spec.height; ++row) {
    for (int col = 0; col < image.spec.width; ++col) {
      const double depth = image.at(col, row);
      if (!DepthImage::valid(depth)) continue;
      const Vec3 hit = pose.position + depth * (pose.rotation * image.spec.ray_direction(col, row));
      dirty.merge(map.add_hit(hit));
    }
  }
  return dirty;
}

MeshChunk extract_chunk_mesh(const VoxelMap& map, const ChunkCoord& coords) {
  MeshChunk mesh;
  mesh.coords = coords;
  mesh.revision = map.revision(coords);

  std::map<std::array<int, 3>, std::uint32_t> welded;
  std::vector<Eigen::Vector3i> normal_sums;

  auto vertex = [&](const Eigen::Vector3i& lattice, const Eigen::Vector3i& normal) {
    const std::array<int, 3> key{lattice.x(), lattice.y(), lattice.z()};
    auto [it, inserted] = welded.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
    if (inserted) {
      const Vec3 p = lattice.cast<double>() * map.voxel_size();
      mesh.vertices.push_back({static_cast<float>(p.x()), static_cast<float>(p.y()),
                               static_cast<float>(p.z())});
      normal_sums.push_back(Eigen::Vector3i::Zero());
    }
    normal_sums[it->second] += normal;
    return it->second;
  };

  const Eigen::Vector3i origin(coords.x * kChunkEdge, coords.y * kChunkEdge, coords.z * kChunkEdge);
  for (int z = 0; z < kChunkEdge; ++z) {
    for (int y = 0; y < kChunkEdge; ++y) {
      for (int x = 0; x < kChunkEdge; ++x) {
        const VoxelIndex voxel = origin + Eigen::Vector3i(x, y, z);
        if (!map.occupied(voxel)) continue;
        for (int axis = 0; axis < 3; ++axis) {
          for (int sign : {-1, 1}) {
            VoxelIndex neighbour = voxel;
            neighbour[axis] += sign;
            if (map.occupied(neighbour)) continue;

            const Eigen::Vector3i eu = Eigen::Vector3i::Unit((axis + 1) % 3);
            const Eigen::Vector3i ev = Eigen::Vector3i::Unit((axis + 2) % 3);
            const Eigen::Vector3i normal = sign * Eigen::Vector3i::Unit(axis);
            const Eigen::Vector3i base =
                sign > 0 ? Eigen::Vector3i(voxel + Eigen::Vector3i::Unit(axis)) : voxel;
            // eu x ev = +axis; reverse the winding for the negative face.
            std::array<Eigen::Vector3i, 4> quad{base, base + eu, base + eu + ev, base + ev};
            if (sign < 0) std::swap(quad[1], quad[3]);
            std::array<std::uint32_t, 4> idx{};
            for (int i = 0; i < 4; ++i) idx[i] = vertex(quad[i], normal);
            mesh.triangles.push_back({idx[0], idx[1], idx[2]});
            mesh.triangles.push_back({idx[0], idx[2], idx[3]});
          }
        }
      }
    }
  }

  mesh.normals.reserve(normal_sums.size());
  for (const Eigen::Vector3i& sum : normal_sums) {
    Vec3 n = sum.cast<double>();
    // Opposing faces can cancel at a shared corner; fall back to +z.
    n = n.norm() > 0.0 ? n.normalized() : Vec3::UnitZ();
    mesh.normals.push_back(
        {static_cast<float>(n.x()), static_cast<float>(n.y()), static_cast<float>(n.z())});
  }
  return mesh;
}

}  // namespace vrgcs::scan
