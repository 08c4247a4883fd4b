#pragma once

#include "scan/depth_camera.hpp"
#include "scan/mesh_chunk.hpp"

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <utility>

namespace vrgcs::scan {

using VoxelIndex = Eigen::Vector3i;

inline constexpr int kChunkEdge = 16;
inline constexpr int kChunkVoxels = kChunkEdge * kChunkEdge * kChunkEdge;

class UnknownChunkError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Sparse occupancy map. Each voxel carries a hit counter; a voxel is part of
/// the surface once its counter reaches the threshold. Chunk revisions bump
/// whenever the set of surface voxels that the chunk's mesh depends on changes.
class VoxelMap {
 public:
  explicit VoxelMap(double voxel_size = 0.10, std::uint32_t threshold = 1);

  double voxel_size() const { return voxel_size_; }

  VoxelIndex voxel_of(const Vec3& point) const;
  static ChunkCoord chunk_of(const VoxelIndex& voxel);

  /// Adds one hit to the voxel containing the point. Returns the chunks whose
  /// surface changed (the owning chunk plus existing neighbours sharing a
  /// face with a boundary voxel), already revision-bumped.
  std::set<ChunkCoord> add_hit(const Vec3& point);

  std::uint32_t counter(const VoxelIndex& voxel) const;
  bool occupied(const VoxelIndex& voxel) const;

  bool contains(const ChunkCoord& coords) const { return chunks_.count(coords) != 0; }
  std::uint32_t revision(const ChunkCoord& coords) const;
  std::size_t chunk_count() const { return chunks_.size(); }

  /// (coords, revision) for every chunk, ordered by coords.
  std::vector<std::pair<ChunkCoord, std::uint32_t>> chunk_list() const;

 private:
  struct Block {
    std::array<std::uint32_t, kChunkVoxels> counters{};
    std::uint32_t revision = 0;
  };

  static int local_offset(const VoxelIndex& voxel);

  double voxel_size_;
  std::uint32_t threshold_;
  std::map<ChunkCoord, Block> chunks_;
};

/// Marks every valid depth sample's voxel; returns the changed chunks.
std::set<ChunkCoord> integrate_scan(VoxelMap& map, const DepthImage& image);

/// Blocky surface: one quad per surface-voxel face whose neighbour is not a
/// surface voxel, welded on the voxel lattice. Throws UnknownChunkError.
MeshChunk extract_chunk_mesh(const VoxelMap& map, const ChunkCoord& coords);

}  // namespace vrgcs::scan
