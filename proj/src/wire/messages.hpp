#pragma once

#include "scan/mesh_chunk.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vrgcs::wire {

inline constexpr int kProtocolVersion = 1;

struct ChunkEntry {
  scan::ChunkCoord coords;
  std::uint32_t revision = 0;

  bool operator==(const ChunkEntry&) const = default;
};

/// Server to client: session greeting. A client's hello only needs
/// protocol_version; the remaining fields default when absent.
struct Hello {
  int protocol_version = kProtocolVersion;
  std::string world_name;
  std::vector<ChunkEntry> chunk_list;
  std::array<double, 3> viewer_offset_m{0.0, 0.0, 0.0};

  bool operator==(const Hello&) const = default;
};

struct Pose {
  std::uint64_t t_ns = 0;
  std::array<double, 3> p{0.0, 0.0, 0.0};
  std::array<double, 4> q{1.0, 0.0, 0.0, 0.0};  // w, x, y, z
  /// Latest one-way latency measured for the receiving session, if any.
  std::optional<double> latency_ms;

  bool operator==(const Pose&) const = default;
};

struct CmdVel {
  double vx = 0.0;
  double vy = 0.0;
  double vz = 0.0;
  double yaw_rate = 0.0;

  bool operator==(const CmdVel&) const = default;
};

struct Takeoff {
  bool operator==(const Takeoff&) const = default;
};

struct Land {
  bool operator==(const Land&) const = default;
};

struct Ping {
  std::uint64_t id = 0;
  std::uint64_t t_tx_ns = 0;

  bool operator==(const Ping&) const = default;
};

struct Pong {
  std::uint64_t id = 0;
  std::uint64_t t_tx_ns = 0;

  bool operator==(const Pong&) const = default;
};

struct ChunkNotice {
  scan::ChunkCoord coords;
  std::uint32_t revision = 0;

  bool operator==(const ChunkNotice&) const = default;
};

using Envelope = std::variant<Hello, Pose, CmdVel, Takeoff, Land, Ping, Pong, ChunkNotice>;

std::string_view type_name(const Envelope& env);

enum class MessageErrorKind { UnknownType, MissingField, BadValue };

class MessageError : public std::runtime_error {
 public:
  MessageError(MessageErrorKind kind, const std::string& detail);
  MessageErrorKind kind() const { return kind_; }

 private:
  MessageErrorKind kind_;
};

/// One JSON object, no trailing newline. Timestamps and ids are emitted as
/// JSON integers.
std::string encode_message(const Envelope& env);

/// Total over arbitrary text; throws MessageError. Value limits (v_max etc.)
/// are not enforced here.
Envelope decode_message(std::string_view text);

struct LatencyProbe {
  std::uint64_t id = 0;
  std::uint64_t t_tx_ns = 0;
  std::uint64_t t_rx_ns = 0;
  std::uint64_t one_way_ns = 0;

  bool operator==(const LatencyProbe&) const = default;
};

class NegativeIntervalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Half the round trip, integer division.
std::uint64_t resolve_probe(std::uint64_t t_tx_ns, std::uint64_t t_rx_ns);

LatencyProbe make_probe(std::uint64_t id, std::uint64_t t_tx_ns, std::uint64_t t_rx_ns);

}  // namespace vrgcs::wire
