#include "wire/mesh_codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <string>

namespace vrgcs::wire {

namespace {

constexpr std::uint8_t kMagic[4] = {0x4D, 0x53, 0x48, 0x31};

class Writer {
 public:
  explicit Writer(std::size_t size) { out_.reserve(size); }

  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v), 4); }
  void f32(float v) { put(std::bit_cast<std::uint32_t>(v), 4); }
  void bytes(const std::uint8_t* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void put(std::uint32_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::size_t remaining() const { return in_.size() - pos_; }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return get(4); }
  std::int32_t i32() { return static_cast<std::int32_t>(get(4)); }
  float f32() { return std::bit_cast<float>(get(4)); }

 private:
  std::uint32_t get(int n) {
    std::uint32_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint32_t>(in_[pos_ + i]) << (8 * i);
    pos_ += n;
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view to_string(MeshDecodeErrorKind kind) {
  switch (kind) {
    case MeshDecodeErrorKind::BadMagic: return "BadMagic";
    case MeshDecodeErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case MeshDecodeErrorKind::Truncated: return "Truncated";
    case MeshDecodeErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case MeshDecodeErrorKind::TrailingData: return "TrailingData";
    case MeshDecodeErrorKind::NonFinite: return "NonFinite";
  }
  return "Unknown";
}

MeshDecodeError::MeshDecodeError(MeshDecodeErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

std::vector<std::uint8_t> encode_mesh_chunk(const scan::MeshChunk& chunk) {
  const std::size_t v = chunk.vertices.size();
  const std::size_t t = chunk.triangles.size();
  if (v > kMaxMeshElements || t > kMaxMeshElements)
    throw std::length_error("mesh chunk exceeds MSH1 element limits");
  if (chunk.normals.size() != v) throw std::invalid_argument("one normal per vertex required");

  Writer w(encoded_mesh_size(v, t));
  w.bytes(kMagic, 4);
  w.u16(kMeshVersion);
  w.u16(0);
  w.i32(chunk.coords.x);
  w.i32(chunk.coords.y);
  w.i32(chunk.coords.z);
  w.u32(chunk.revision);
  w.u16(static_cast<std::uint16_t>(v));
  w.u16(static_cast<std::uint16_t>(t));
  for (const auto& p : chunk.vertices)
    for (float c : p) w.f32(c);
  for (const auto& n : chunk.normals)
    for (float c : n) w.f32(c);
  for (const auto& tri : chunk.triangles)
    for (std::uint32_t i : tri) w.u32(i);
  return w.take();
}

scan::MeshChunk decode_mesh_chunk(std::span<const std::uint8_t> bytes) {
  const std::size_t magic_len = std::min<std::size_t>(bytes.size(), 4);
  if (magic_len > 0 && std::memcmp(bytes.data(), kMagic, magic_len) != 0)
    throw MeshDecodeError(MeshDecodeErrorKind::BadMagic, "payload does not start with MSH1");
  if (bytes.size() < kMeshHeaderSize)
    throw MeshDecodeError(MeshDecodeErrorKind::Truncated,
                          "header needs 28 bytes, got " + std::to_string(bytes.size()));

  Reader r(bytes.subspan(4));
  const std::uint16_t version = r.u16();
  if (version != kMeshVersion)
    throw MeshDecodeError(MeshDecodeErrorKind::UnsupportedVersion,
                          "version " + std::to_string(version));
  r.u16();  // flags, reserved

  scan::MeshChunk chunk;
  chunk.coords.x = r.i32();
  chunk.coords.y = r.i32();
  chunk.coords.z = r.i32();
  chunk.revision = r.u32();
  const std::size_t v = r.u16();
  const std::size_t t = r.u16();

  const std::size_t body = 24 * v + 12 * t;
  if (r.remaining() < body)
    throw MeshDecodeError(MeshDecodeErrorKind::Truncated,
                          "declared " + std::to_string(v) + " vertices and " + std::to_string(t) +
                              " triangles need " + std::to_string(body) + " bytes, have " +
                              std::to_string(r.remaining()));
  if (r.remaining() > body)
    throw MeshDecodeError(MeshDecodeErrorKind::TrailingData,
                          std::to_string(r.remaining() - body) + " bytes after the last index");

  auto read_vec = [&](std::vector<std::array<float, 3>>& out, const char* what) {
    out.resize(v);
    for (auto& p : out) {
      for (float& c : p) {
        c = r.f32();
        if (!std::isfinite(c))
          throw MeshDecodeError(MeshDecodeErrorKind::NonFinite, std::string("non-finite ") + what);
      }
    }
  };
  read_vec(chunk.vertices, "position");
  read_vec(chunk.normals, "normal");

  chunk.triangles.resize(t);
  for (auto& tri : chunk.triangles) {
    for (std::uint32_t& i : tri) {
      i = r.u32();
      if (i >= v)
        throw MeshDecodeError(MeshDecodeErrorKind::IndexOutOfRange,
                              "index " + std::to_string(i) + " >= vertex count " + std::to_string(v));
    }
  }
  return chunk;
}

std::vector<std::uint8_t> frame_binary(std::span<const std::uint8_t> payload) {
  if (payload.size() > 0xFFFFFFFFu) throw std::length_error("frame payload too large");
  Writer w(payload.size() + 4);
  w.u32(static_cast<std::uint32_t>(payload.size()));
  w.bytes(payload.data(), payload.size());
  return w.take();
}

std::span<const std::uint8_t> unframe_binary(std::span<const std::uint8_t> frame) {
  if (frame.size() < 4)
    throw MeshDecodeError(MeshDecodeErrorKind::Truncated, "frame shorter than its length prefix");
  Reader r(frame);
  const std::uint32_t len = r.u32();
  if (r.remaining() < len)
    throw MeshDecodeError(MeshDecodeErrorKind::Truncated, "frame payload shorter than declared");
  if (r.remaining() > len)
    throw MeshDecodeError(MeshDecodeErrorKind::TrailingData, "bytes after frame payload");
  return frame.subspan(4, len);
}

}  // namespace vrgcs::wire
