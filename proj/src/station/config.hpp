#pragma once

#include "control/controller.hpp"
#include "control/pilot.hpp"
#include "dynamics/dynamics.hpp"
#include "scan/depth_camera.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace vrgcs::station {

struct ServerConfig {
  std::string listen_address = "0.0.0.0";
  std::uint16_t port = 8765;

  double physics_rate_hz = 500.0;
  double scan_rate_hz = 10.0;
  double pose_rate_hz = 30.0;
  double probe_rate_hz = 10.0;

  dynamics::VehicleParams vehicle;
  control::GainSet gains;
  control::PilotLimits limits{.command_timeout = 0.5};

  std::filesystem::path world_path;
  std::array<double, 3> viewer_offset_m{5.0, 0.0, 0.0};

  scan::DepthCameraSpec camera;
  double voxel_size = 0.10;
  bool mapping_enabled = true;

  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `key = value` lines with '#' comments. Vector values are whitespace or
/// comma separated. Relative world paths resolve against base_dir.
ServerConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ServerConfig load_config(const std::filesystem::path& path);

}  // namespace vrgcs::station
