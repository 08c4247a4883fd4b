#pragma once

#include "scan/mesh_chunk.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace vrgcs::wire {

/// MSH1 little-endian layout:
///   offset  0  magic "MSH1" (4D 53 48 31)
///   offset  4  u16 version (1)
///   offset  6  u16 flags (0, reserved)
///   offset  8  i32 chunk x, y, z
///   offset 20  u32 revision
///   offset 24  u16 vertex count V
///   offset 26  u16 triangle count T
///   offset 28  V x 3 f32 positions, V x 3 f32 normals, T x 3 u32 indices
/// Total length 28 + 24V + 12T.
inline constexpr std::size_t kMeshHeaderSize = 28;
inline constexpr std::uint16_t kMeshVersion = 1;
inline constexpr std::size_t kMaxMeshElements = 0xFFFF;

enum class MeshDecodeErrorKind { BadMagic, UnsupportedVersion, Truncated, IndexOutOfRange, TrailingData, NonFinite };

std::string_view to_string(MeshDecodeErrorKind kind);

class MeshDecodeError : public std::runtime_error {
 public:
  MeshDecodeError(MeshDecodeErrorKind kind, const std::string& detail);
  MeshDecodeErrorKind kind() const { return kind_; }

 private:
  MeshDecodeErrorKind kind_;
};

constexpr std::size_t encoded_mesh_size(std::size_t vertices, std::size_t triangles) {
  return kMeshHeaderSize + 24 * vertices + 12 * triangles;
}

/// Throws std::length_error if the chunk exceeds the u16 element counts.
std::vector<std::uint8_t> encode_mesh_chunk(const scan::MeshChunk& chunk);

/// Total over arbitrary input: returns a chunk or throws MeshDecodeError.
/// Nothing is allocated before the declared counts are checked against the
/// available bytes.
scan::MeshChunk decode_mesh_chunk(std::span<const std::uint8_t> bytes);

/// Binary channel framing: u32 little-endian payload length, then payload.
std::vector<std::uint8_t> frame_binary(std::span<const std::uint8_t> payload);

/// Returns the payload of one complete frame; throws MeshDecodeError
/// (Truncated / TrailingData) when the length prefix does not match.
std::span<const std::uint8_t> unframe_binary(std::span<const std::uint8_t> frame);

}  // namespace vrgcs::wire
