#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <vector>

namespace vrgcs::scan {

struct ChunkCoord {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t z = 0;

  auto operator<=>(const ChunkCoord&) const = default;
};

/// Triangle surface of one map chunk at a given revision. Positions are
/// world-frame meters.
struct MeshChunk {
  ChunkCoord coords;
  std::uint32_t revision = 0;
  std::vector<std::array<float, 3>> vertices;
  std::vector<std::array<float, 3>> normals;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  bool operator==(const MeshChunk&) const = default;
};

}  // namespace vrgcs::scan
