#include "vrgcs/vrgcs.h"

#include "scan/world.hpp"
#include "station/config.hpp"
#include "station/script.hpp"
#include "station/server.hpp"
#include "telemetry/latency.hpp"
#include "wire/mesh_codec.hpp"
#include "wire/messages.hpp"

#include <spdlog/spdlog.h>

#include <cstdlib>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <system_error>

struct vrgcs_server {
  std::unique_ptr<vrgcs::station::GroundStation> station;
  std::optional<std::string> latency_csv_path;
  bool started = false;
  bool stopped = false;
};

namespace {

thread_local std::string g_last_error;

vrgcs_status fail(vrgcs_status status, const std::string& detail) {
  g_last_error = detail;
  return status;
}

vrgcs_status ok() {
  g_last_error.clear();
  return VRGCS_OK;
}

void init_logging() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (const char* level = std::getenv("VR_GCS_LOG")) spdlog::set_level(spdlog::level::from_str(level));
  });
}

template <typename F>
vrgcs_status guarded(F&& body) {
  try {
    return body();
  } catch (const vrgcs::station::ConfigError& e) {
    return fail(VRGCS_ERR_CONFIG, e.what());
  } catch (const vrgcs::scan::WorldError& e) {
    return fail(VRGCS_ERR_WORLD, e.what());
  } catch (const vrgcs::station::ScriptError& e) {
    return fail(VRGCS_ERR_SCRIPT, e.what());
  } catch (const vrgcs::wire::MeshDecodeError& e) {
    return fail(VRGCS_ERR_DECODE, e.what());
  } catch (const vrgcs::telemetry::EmptyLogError& e) {
    return fail(VRGCS_ERR_EMPTY, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(VRGCS_ERR_IO, e.what());
  } catch (const std::system_error& e) {
    return fail(VRGCS_ERR_BIND, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(VRGCS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::runtime_error& e) {
    return fail(VRGCS_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(VRGCS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(VRGCS_ERR_INTERNAL, "unknown exception");
  }
}

}  // namespace

extern "C" {

const char* vrgcs_status_string(vrgcs_status status) {
  switch (status) {
    case VRGCS_OK: return "ok";
    case VRGCS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case VRGCS_ERR_CONFIG: return "config error";
    case VRGCS_ERR_WORLD: return "world error";
    case VRGCS_ERR_SCRIPT: return "script error";
    case VRGCS_ERR_BIND: return "bind failure";
    case VRGCS_ERR_IO: return "i/o error";
    case VRGCS_ERR_STATE: return "invalid state";
    case VRGCS_ERR_EMPTY: return "empty log";
    case VRGCS_ERR_DECODE: return "decode error";
    case VRGCS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* vrgcs_last_error(void) { return g_last_error.c_str(); }

int vrgcs_protocol_version(void) { return vrgcs::wire::kProtocolVersion; }

void vrgcs_server_options_init(vrgcs_server_options* options) {
  if (!options) return;
  *options = {};
  options->port = -1;
}

vrgcs_status vrgcs_server_create(const vrgcs_server_options* options, vrgcs_server** out) {
  init_logging();
  if (!options || !out || !options->config_path)
    return fail(VRGCS_ERR_INVALID_ARGUMENT, "options, config_path and out are required");
  *out = nullptr;
  return guarded([&] {
    using namespace vrgcs;
    station::ServerConfig config = station::load_config(options->config_path);
    if (options->world_path) config.world_path = options->world_path;
    if (options->port >= 0) {
      if (options->port > 65535) return fail(VRGCS_ERR_INVALID_ARGUMENT, "port out of range");
      config.port = static_cast<std::uint16_t>(options->port);
    }
    if (config.world_path.empty()) return fail(VRGCS_ERR_CONFIG, "no world file configured");
    scan::WorldModel world = scan::load_world(config.world_path);

    station::GroundStation::Options station_options;
    station_options.fast = options->fast != 0;
    if (options->script_path) station_options.script = station::load_script(options->script_path);

    auto server = std::make_unique<vrgcs_server>();
    server->station =
        std::make_unique<station::GroundStation>(std::move(config), std::move(world), std::move(station_options));
    if (options->latency_csv_path) server->latency_csv_path = options->latency_csv_path;
    *out = server.release();
    return ok();
  });
}

vrgcs_status vrgcs_server_start(vrgcs_server* server) {
  if (!server) return fail(VRGCS_ERR_INVALID_ARGUMENT, "null server");
  if (server->started) return fail(VRGCS_ERR_STATE, "server already started");
  return guarded([&] {
    server->station->start();
    server->started = true;
    return ok();
  });
}

vrgcs_status vrgcs_server_port(const vrgcs_server* server, uint16_t* port) {
  if (!server || !port) return fail(VRGCS_ERR_INVALID_ARGUMENT, "null argument");
  if (!server->started) return fail(VRGCS_ERR_STATE, "server not started");
  *port = server->station->port();
  return ok();
}

vrgcs_status vrgcs_server_wait(vrgcs_server* server, int64_t timeout_ms, int32_t* finished) {
  if (!server || !finished) return fail(VRGCS_ERR_INVALID_ARGUMENT, "null argument");
  if (!server->started) return fail(VRGCS_ERR_STATE, "server not started");
  return guarded([&] {
    if (timeout_ms < 0) {
      while (!server->station->wait_for(std::chrono::hours(1))) {
      }
      *finished = 1;
    } else {
      *finished = server->station->wait_for(std::chrono::milliseconds(timeout_ms)) ? 1 : 0;
    }
    return ok();
  });
}

vrgcs_status vrgcs_server_stop(vrgcs_server* server) {
  if (!server) return fail(VRGCS_ERR_INVALID_ARGUMENT, "null server");
  if (!server->started) return fail(VRGCS_ERR_STATE, "server not started");
  if (server->stopped) return ok();
  return guarded([&] {
    server->station->stop();
    server->stopped = true;
    if (server->latency_csv_path)
      vrgcs::telemetry::export_csv(server->station->latency_log(), *server->latency_csv_path);
    return ok();
  });
}

vrgcs_status vrgcs_server_set_mapping(vrgcs_server* server, int32_t enabled) {
  if (!server) return fail(VRGCS_ERR_INVALID_ARGUMENT, "null server");
  return guarded([&] {
    server->station->set_mapping(enabled != 0);
    return ok();
  });
}

vrgcs_status vrgcs_server_export_latency_csv(vrgcs_server* server, const char* path) {
  if (!server || !path) return fail(VRGCS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    vrgcs::telemetry::export_csv(server->station->latency_log(), path);
    return ok();
  });
}

void vrgcs_server_destroy(vrgcs_server* server) {
  if (!server) return;
  try {
    if (server->started && !server->stopped) vrgcs_server_stop(server);
  } catch (...) {
  }
  delete server;
}

vrgcs_status vrgcs_server_mission_report(const vrgcs_server* server, vrgcs_mission_report* out) {
  if (!server || !out) return fail(VRGCS_ERR_INVALID_ARGUMENT, "null argument");
  const auto report = server->station->mission_report();
  if (!report) return fail(VRGCS_ERR_STATE, "no finished scripted run");
  out->min_wall_clearance = report->min_wall_clearance;
  out->return_error = report->return_error;
  out->touchdown_speed = report->touchdown_speed;
  out->max_latency_ms = report->max_latency_ms;
  out->mean_latency_ms = report->mean_latency_ms;
  out->median_latency_ms = report->median_latency_ms;
  out->passed = report->passed ? 1 : 0;
  return ok();
}

vrgcs_status vrgcs_latency_stats_from_csv(const char* path, vrgcs_latency_stats* out) {
  if (!path || !out) return fail(VRGCS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto stats = vrgcs::telemetry::latency_stats(vrgcs::telemetry::read_csv(path));
    out->mean_ms = stats.mean_ms;
    out->median_ms = stats.median_ms;
    out->max_ms = stats.max_ms;
    out->count = stats.count;
    return ok();
  });
}

vrgcs_status vrgcs_mesh_inspect(const uint8_t* bytes, size_t length, vrgcs_mesh_info* out) {
  if ((!bytes && length) || !out) return fail(VRGCS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto chunk = vrgcs::wire::decode_mesh_chunk({bytes, length});
    out->chunk_x = chunk.coords.x;
    out->chunk_y = chunk.coords.y;
    out->chunk_z = chunk.coords.z;
    out->revision = chunk.revision;
    out->vertex_count = static_cast<uint32_t>(chunk.vertices.size());
    out->triangle_count = static_cast<uint32_t>(chunk.triangles.size());
    return ok();
  });
}

}  // extern "C"
