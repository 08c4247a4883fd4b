#include "wire/messages.hpp"

#include <json.hpp>

#include <cmath>

namespace vrgcs::wire {

using nlohmann::json;

namespace {

std::string_view kind_name(MessageErrorKind kind) {
  switch (kind) {
    case MessageErrorKind::UnknownType: return "UnknownType";
    case MessageErrorKind::MissingField: return "MissingField";
    case MessageErrorKind::BadValue: return "BadValue";
  }
  return "Unknown";
}

[[noreturn]] void bad(const std::string& detail) {
  throw MessageError(MessageErrorKind::BadValue, detail);
}

const json& field(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end()) throw MessageError(MessageErrorKind::MissingField, name);
  return *it;
}

std::uint64_t as_u64(const json& v, const char* name) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  bad(std::string(name) + " must be a non-negative integer");
}

std::uint32_t as_u32(const json& v, const char* name) {
  const std::uint64_t x = as_u64(v, name);
  if (x > 0xFFFFFFFFull) bad(std::string(name) + " exceeds u32");
  return static_cast<std::uint32_t>(x);
}

std::int32_t as_i32(const json& v, const char* name) {
  if (!v.is_number_integer()) bad(std::string(name) + " must be an integer");
  if (v.is_number_unsigned()) {
    const auto x = v.get<std::uint64_t>();
    if (x > 0x7FFFFFFFull) bad(std::string(name) + " exceeds i32");
    return static_cast<std::int32_t>(x);
  }
  const auto x = v.get<std::int64_t>();
  if (x < INT32_MIN || x > INT32_MAX) bad(std::string(name) + " exceeds i32");
  return static_cast<std::int32_t>(x);
}

double as_finite(const json& v, const char* name) {
  if (!v.is_number()) bad(std::string(name) + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(std::string(name) + " must be finite");
  return x;
}

template <std::size_t N>
std::array<double, N> as_array(const json& v, const char* name) {
  if (!v.is_array() || v.size() != N)
    bad(std::string(name) + " must be an array of " + std::to_string(N) + " numbers");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = as_finite(v[i], name);
  return out;
}

scan::ChunkCoord as_coords(const json& v) {
  if (!v.is_array() || v.size() != 3) bad("coords must be an array of 3 integers");
  return {as_i32(v[0], "coords"), as_i32(v[1], "coords"), as_i32(v[2], "coords")};
}

json coords_json(const scan::ChunkCoord& c) { return json::array({c.x, c.y, c.z}); }

struct Encoder {
  json operator()(const Hello& m) const {
    json chunks = json::array();
    for (const ChunkEntry& e : m.chunk_list)
      chunks.push_back({{"coords", coords_json(e.coords)}, {"revision", e.revision}});
    return {{"type", "hello"},
            {"protocol_version", m.protocol_version},
            {"world_name", m.world_name},
            {"chunk_list", std::move(chunks)},
            {"viewer_offset_m", m.viewer_offset_m}};
  }
  json operator()(const Pose& m) const {
    json j = {{"type", "pose"}, {"t_ns", m.t_ns}, {"p", m.p}, {"q", m.q}};
    if (m.latency_ms) j["latency_ms"] = *m.latency_ms;
    return j;
  }
  json operator()(const CmdVel& m) const {
    return {{"type", "cmd_vel"}, {"vx", m.vx}, {"vy", m.vy}, {"vz", m.vz}, {"yaw_rate", m.yaw_rate}};
  }
  json operator()(const Takeoff&) const { return {{"type", "takeoff"}}; }
  json operator()(const Land&) const { return {{"type", "land"}}; }
  json operator()(const Ping& m) const {
    return {{"type", "ping"}, {"id", m.id}, {"t_tx_ns", m.t_tx_ns}};
  }
  json operator()(const Pong& m) const {
    return {{"type", "pong"}, {"id", m.id}, {"t_tx_ns", m.t_tx_ns}};
  }
  json operator()(const ChunkNotice& m) const {
    return {{"type", "chunk_notice"}, {"coords", coords_json(m.coords)}, {"revision", m.revision}};
  }
};

}  // namespace

MessageError::MessageError(MessageErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(kind_name(kind)) + ": " + detail), kind_(kind) {}

std::string_view type_name(const Envelope& env) {
  static constexpr std::string_view names[] = {"hello", "pose", "cmd_vel", "takeoff",
                                               "land",  "ping", "pong",    "chunk_notice"};
  return names[env.index()];
}

std::string encode_message(const Envelope& env) { return std::visit(Encoder{}, env).dump(); }

Envelope decode_message(std::string_view text) {
  json j = json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) bad("malformed JSON");
  if (!j.is_object()) bad("message must be a JSON object");
  const json& type_field = field(j, "type");
  if (!type_field.is_string()) bad("type must be a string");
  const std::string type = type_field.get<std::string>();

  if (type == "hello") {
    Hello m;
    m.protocol_version = as_i32(field(j, "protocol_version"), "protocol_version");
    if (auto it = j.find("world_name"); it != j.end()) {
      if (!it->is_string()) bad("world_name must be a string");
      m.world_name = it->get<std::string>();
    }
    if (auto it = j.find("chunk_list"); it != j.end()) {
      if (!it->is_array()) bad("chunk_list must be an array");
      for (const json& e : *it) {
        if (!e.is_object()) bad("chunk_list entries must be objects");
        m.chunk_list.push_back({as_coords(field(e, "coords")), as_u32(field(e, "revision"), "revision")});
      }
    }
    if (auto it = j.find("viewer_offset_m"); it != j.end())
      m.viewer_offset_m = as_array<3>(*it, "viewer_offset_m");
    return m;
  }
  if (type == "pose") {
    Pose m;
    m.t_ns = as_u64(field(j, "t_ns"), "t_ns");
    m.p = as_array<3>(field(j, "p"), "p");
    m.q = as_array<4>(field(j, "q"), "q");
    const double norm = std::sqrt(m.q[0] * m.q[0] + m.q[1] * m.q[1] + m.q[2] * m.q[2] + m.q[3] * m.q[3]);
    if (std::abs(norm - 1.0) > 1e-6) bad("q must be a unit quaternion");
    if (auto it = j.find("latency_ms"); it != j.end()) m.latency_ms = as_finite(*it, "latency_ms");
    return m;
  }
  if (type == "cmd_vel") {
    return CmdVel{as_finite(field(j, "vx"), "vx"), as_finite(field(j, "vy"), "vy"),
                  as_finite(field(j, "vz"), "vz"), as_finite(field(j, "yaw_rate"), "yaw_rate")};
  }
  if (type == "takeoff") return Takeoff{};
  if (type == "land") return Land{};
  if (type == "ping")
    return Ping{as_u64(field(j, "id"), "id"), as_u64(field(j, "t_tx_ns"), "t_tx_ns")};
  if (type == "pong")
    return Pong{as_u64(field(j, "id"), "id"), as_u64(field(j, "t_tx_ns"), "t_tx_ns")};
  if (type == "chunk_notice")
    return ChunkNotice{as_coords(field(j, "coords")), as_u32(field(j, "revision"), "revision")};

  throw MessageError(MessageErrorKind::UnknownType, type);
}

std::uint64_t resolve_probe(std::uint64_t t_tx_ns, std::uint64_t t_rx_ns) {
  if (t_rx_ns < t_tx_ns) throw NegativeIntervalError("probe received before it was sent");
  return (t_rx_ns - t_tx_ns) / 2;
}

LatencyProbe make_probe(std::uint64_t id, std::uint64_t t_tx_ns, std::uint64_t t_rx_ns) {
  return {id, t_tx_ns, t_rx_ns, resolve_probe(t_tx_ns, t_rx_ns)};
}

}  // namespace vrgcs::wire
