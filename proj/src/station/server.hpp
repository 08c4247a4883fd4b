#pragma once

#include "station/config.hpp"
#include "station/script.hpp"
#include "telemetry/latency.hpp"
#include "telemetry/mission.hpp"
#include "wire/messages.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace vrgcs::station {

struct SessionInfo {
  std::uint64_t id = 0;
  bool subscribed = false;
  bool control_authority = false;
  std::uint64_t commands_accepted = 0;
  std::uint64_t rejected_no_authority = 0;
  std::uint64_t rejected_not_armed = 0;
  std::uint64_t chunks_sent = 0;
  std::uint64_t poses_sent = 0;
  std::optional<double> last_latency_ms;
  std::map<scan::ChunkCoord, std::uint32_t> acked_revisions;
};

/// The ground-station service: one simulation thread (physics, control,
/// scanning) and one network thread serving WebSocket sessions on a single
/// port. Text frames carry JSON envelopes; binary frames carry length-prefixed
/// MSH1 chunks, each preceded by a chunk_notice.
class GroundStation {
 public:
  struct Options {
    bool fast = false;
    std::optional<std::vector<ScriptEvent>> script;
    double script_tail_s = 60.0;
  };

  GroundStation(ServerConfig config, scan::WorldModel world, Options options);
  ~GroundStation();

  GroundStation(const GroundStation&) = delete;
  GroundStation& operator=(const GroundStation&) = delete;

  /// Binds the listening socket and launches both threads. Throws
  /// std::system_error on bind failure.
  void start();
  std::uint16_t port() const;

  /// Blocks until the simulation finished (script exhausted) or the timeout
  /// elapsed. Returns true when finished.
  bool wait_for(std::chrono::milliseconds timeout);
  bool finished() const;
  void stop();

  void set_mapping(bool enabled);

  /// Authority gate + mode gate + clamp for one decoded client envelope.
  control::CommandOutcome ingest_command(std::uint64_t session_id, const wire::Envelope& env);

  std::vector<SessionInfo> sessions() const;
  telemetry::LatencyLog latency_log() const;
  std::size_t chunk_count() const;

  /// Available once a scripted run has finished.
  std::optional<telemetry::MissionReport> mission_report() const;
  std::vector<dynamics::VehicleState> trajectory() const;

  /// Nanoseconds since the server epoch (construction).
  std::uint64_t now_ns() const;

 private:
  friend class Session;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vrgcs::station
