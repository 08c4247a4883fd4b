#include "station/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

namespace vrgcs::station {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> numbers(const std::string& value) {
  std::string v = value;
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream in(v);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || !std::isfinite(x))
      throw ConfigError("'" + token + "' is not a finite number");
    out.push_back(x);
  }
  return out;
}

double scalar(const std::string& value) {
  const auto v = numbers(value);
  if (v.size() != 1) throw ConfigError("expected one number, got '" + value + "'");
  return v[0];
}

Eigen::Vector3d vec3(const std::string& value) {
  const auto v = numbers(value);
  if (v.size() != 3) throw ConfigError("expected three numbers, got '" + value + "'");
  return {v[0], v[1], v[2]};
}

/// Three values form a diagonal matrix; nine values a row-major matrix.
Eigen::Matrix3d mat3(const std::string& value) {
  const auto v = numbers(value);
  if (v.size() == 3) return Eigen::Vector3d(v[0], v[1], v[2]).asDiagonal();
  if (v.size() == 9) {
    Eigen::Matrix3d m;
    m << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
    return m;
  }
  throw ConfigError("expected 3 (diagonal) or 9 (row-major) numbers, got '" + value + "'");
}

bool boolean(const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw ConfigError("expected a boolean, got '" + value + "'");
}

int integer(const std::string& value) {
  const double x = scalar(value);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError("expected an integer, got '" + value + "'");
  return static_cast<int>(x);
}

}  // namespace

void ServerConfig::validate() const {
  for (double rate : {physics_rate_hz, scan_rate_hz, pose_rate_hz, probe_rate_hz})
    if (!(rate > 0.0)) throw ConfigError("rates must be positive");
  if (physics_rate_hz < 100.0) throw ConfigError("physics_rate_hz must be >= 100 (dt <= 10 ms)");
  if (!(voxel_size > 0.0)) throw ConfigError("voxel_size must be positive");
  try {
    vehicle.validate();
    gains.validate();
    limits.validate();
    camera.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ServerConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  ServerConfig cfg;
  constexpr double deg = std::numbers::pi / 180.0;
  Eigen::Vector3d mount_rpy_deg = Eigen::Vector3d::Zero();

  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"listen_address", [&](const std::string& v) { cfg.listen_address = v; }},
      {"port",
       [&](const std::string& v) {
         const int p = integer(v);
         if (p < 0 || p > 65535) throw ConfigError("port out of range");
         cfg.port = static_cast<std::uint16_t>(p);
       }},
      {"physics_rate_hz", [&](const std::string& v) { cfg.physics_rate_hz = scalar(v); }},
      {"scan_rate_hz", [&](const std::string& v) { cfg.scan_rate_hz = scalar(v); }},
      {"pose_rate_hz", [&](const std::string& v) { cfg.pose_rate_hz = scalar(v); }},
      {"probe_rate_hz", [&](const std::string& v) { cfg.probe_rate_hz = scalar(v); }},
      {"mass", [&](const std::string& v) { cfg.vehicle.mass = scalar(v); }},
      {"inertia", [&](const std::string& v) { cfg.vehicle.inertia = mat3(v); }},
      {"gravity", [&](const std::string& v) { cfg.vehicle.gravity = scalar(v); }},
      {"thrust_max", [&](const std::string& v) { cfg.vehicle.thrust_max = scalar(v); }},
      {"torque_max", [&](const std::string& v) { cfg.vehicle.torque_max = vec3(v); }},
      {"gain_position_error", [&](const std::string& v) { cfg.gains.gain_position_error = mat3(v); }},
      {"gain_velocity_error", [&](const std::string& v) { cfg.gains.gain_velocity_error = mat3(v); }},
      {"gain_attitude", [&](const std::string& v) { cfg.gains.gain_attitude = mat3(v); }},
      {"gain_body_rate", [&](const std::string& v) { cfg.gains.gain_body_rate = mat3(v); }},
      {"v_max", [&](const std::string& v) { cfg.limits.v_max = scalar(v); }},
      {"yaw_rate_max", [&](const std::string& v) { cfg.limits.yaw_rate_max = scalar(v); }},
      {"hover_altitude", [&](const std::string& v) { cfg.limits.hover_altitude = scalar(v); }},
      {"climb_rate", [&](const std::string& v) { cfg.limits.climb_rate = scalar(v); }},
      {"land_rate", [&](const std::string& v) { cfg.limits.land_rate = scalar(v); }},
      {"command_timeout", [&](const std::string& v) { cfg.limits.command_timeout = scalar(v); }},
      {"world",
       [&](const std::string& v) {
         std::filesystem::path p(v);
         cfg.world_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
       }},
      {"viewer_offset_m",
       [&](const std::string& v) {
         const auto o = vec3(v);
         cfg.viewer_offset_m = {o.x(), o.y(), o.z()};
       }},
      {"camera_hfov_deg", [&](const std::string& v) { cfg.camera.horizontal_fov_deg = scalar(v); }},
      {"camera_vfov_deg", [&](const std::string& v) { cfg.camera.vertical_fov_deg = scalar(v); }},
      {"camera_min_range", [&](const std::string& v) { cfg.camera.min_range = scalar(v); }},
      {"camera_max_range", [&](const std::string& v) { cfg.camera.max_range = scalar(v); }},
      {"camera_width", [&](const std::string& v) { cfg.camera.width = integer(v); }},
      {"camera_height", [&](const std::string& v) { cfg.camera.height = integer(v); }},
      {"camera_mount_position", [&](const std::string& v) { cfg.camera.mount.position = vec3(v); }},
      {"camera_mount_rpy_deg", [&](const std::string& v) { mount_rpy_deg = vec3(v); }},
      {"voxel_size", [&](const std::string& v) { cfg.voxel_size = scalar(v); }},
      {"mapping_enabled", [&](const std::string& v) { cfg.mapping_enabled = boolean(v); }},
  };

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end())
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    try {
      it->second(value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + " (" + key + "): " + e.what());
    }
  }

  cfg.camera.mount.rotation = dynamics::rotation_from_euler(
      mount_rpy_deg.x() * deg, mount_rpy_deg.y() * deg, mount_rpy_deg.z() * deg);
  cfg.validate();
  return cfg;
}

ServerConfig load_config(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << file.rdbuf();
  try {
    return parse_config(text.str(), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace vrgcs::station
