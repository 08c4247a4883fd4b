#pragma once

#include "control/pilot.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace vrgcs::station {

/// One line of a headless pilot script:
///   t_s cmd_vel vx vy vz yaw_rate
///   t_s takeoff
///   t_s land
///   t_s mapping on|off
struct ScriptEvent {
  enum class Kind { CmdVel, Takeoff, Land, MappingOn, MappingOff };

  double time = 0.0;
  Kind kind = Kind::CmdVel;
  control::VelocityCommand cmd;
};

class ScriptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Events come back sorted by time; equal times keep file order.
std::vector<ScriptEvent> parse_script(const std::string& text);
std::vector<ScriptEvent> load_script(const std::filesystem::path& path);

}  // namespace vrgcs::station
