#ifndef VRGCS_VRGCS_H
#define VRGCS_VRGCS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define VRGCS_API __declspec(dllexport)
#elif defined(__GNUC__)
#  define VRGCS_API __attribute__((visibility("default")))
#else
#  define VRGCS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vrgcs_status {
  VRGCS_OK = 0,
  VRGCS_ERR_INVALID_ARGUMENT = 1,
  VRGCS_ERR_CONFIG = 2,
  VRGCS_ERR_WORLD = 3,
  VRGCS_ERR_SCRIPT = 4,
  VRGCS_ERR_BIND = 5,
  VRGCS_ERR_IO = 6,
  VRGCS_ERR_STATE = 7,
  VRGCS_ERR_EMPTY = 8,
  VRGCS_ERR_DECODE = 9,
  VRGCS_ERR_INTERNAL = 10
} vrgcs_status;

/* Human-readable name of a status code. Static storage. */
VRGCS_API const char* vrgcs_status_string(vrgcs_status status);

/* Detail for the last failing call on this thread; "" if none. Valid until
   the next call into the library from the same thread. */
VRGCS_API const char* vrgcs_last_error(void);

VRGCS_API int vrgcs_protocol_version(void);

typedef struct vrgcs_server vrgcs_server;

typedef struct vrgcs_server_options {
  const char* config_path;      /* required */
  const char* world_path;       /* NULL: use the config's world */
  const char* script_path;      /* NULL: interactive */
  const char* latency_csv_path; /* NULL: no export on stop */
  int32_t port;                 /* < 0: use the config's port; 0: ephemeral */
  int32_t fast;                 /* nonzero: do not pace to wall clock */
} vrgcs_server_options;

VRGCS_API void vrgcs_server_options_init(vrgcs_server_options* options);

VRGCS_API vrgcs_status vrgcs_server_create(const vrgcs_server_options* options, vrgcs_server** out);
VRGCS_API vrgcs_status vrgcs_server_start(vrgcs_server* server);
VRGCS_API vrgcs_status vrgcs_server_port(const vrgcs_server* server, uint16_t* port);

/* Waits up to timeout_ms for a scripted run to finish. *finished is set to 1
   once it has. A negative timeout waits forever. */
VRGCS_API vrgcs_status vrgcs_server_wait(vrgcs_server* server, int64_t timeout_ms, int32_t* finished);

/* Stops both threads and, if configured, writes the latency CSV. */
VRGCS_API vrgcs_status vrgcs_server_stop(vrgcs_server* server);
VRGCS_API vrgcs_status vrgcs_server_set_mapping(vrgcs_server* server, int32_t enabled);
VRGCS_API vrgcs_status vrgcs_server_export_latency_csv(vrgcs_server* server, const char* path);
VRGCS_API void vrgcs_server_destroy(vrgcs_server* server);

typedef struct vrgcs_mission_report {
  double min_wall_clearance;
  double return_error;
  double touchdown_speed;
  double max_latency_ms;
  double mean_latency_ms;
  double median_latency_ms;
  int32_t passed;
} vrgcs_mission_report;

/* VRGCS_ERR_STATE until a scripted run has finished. */
VRGCS_API vrgcs_status vrgcs_server_mission_report(const vrgcs_server* server, vrgcs_mission_report* out);

typedef struct vrgcs_latency_stats {
  double mean_ms;
  double median_ms;
  double max_ms;
  uint64_t count;
} vrgcs_latency_stats;

VRGCS_API vrgcs_status vrgcs_latency_stats_from_csv(const char* path, vrgcs_latency_stats* out);

typedef struct vrgcs_mesh_info {
  int32_t chunk_x;
  int32_t chunk_y;
  int32_t chunk_z;
  uint32_t revision;
  uint32_t vertex_count;
  uint32_t triangle_count;
} vrgcs_mesh_info;

/* Decodes an MSH1 payload (without the length prefix). */
VRGCS_API vrgcs_status vrgcs_mesh_inspect(const uint8_t* bytes, size_t length, vrgcs_mesh_info* out);

#ifdef __cplusplus
}
#endif

#endif
