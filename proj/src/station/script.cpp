#include "station/script.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace vrgcs::station {

std::vector<ScriptEvent> parse_script(const std::string& text) {
  std::vector<ScriptEvent> events;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream fields(raw);
    auto fail = [&](const std::string& why) {
      throw ScriptError("script line " + std::to_string(line_no) + ": " + why);
    };

    ScriptEvent ev;
    std::string verb;
    if (!(fields >> ev.time)) {
      std::string probe;
      std::istringstream again(raw);
      if (again >> probe) fail("expected a time in seconds");
      continue;
    }
    if (!std::isfinite(ev.time) || ev.time < 0.0) fail("time must be finite and non-negative");
    if (!(fields >> verb)) fail("missing command");

    if (verb == "cmd_vel") {
      if (!(fields >> ev.cmd.vx >> ev.cmd.vy >> ev.cmd.vz >> ev.cmd.yaw_rate))
        fail("cmd_vel needs vx vy vz yaw_rate");
      ev.kind = ScriptEvent::Kind::CmdVel;
    } else if (verb == "takeoff") {
      ev.kind = ScriptEvent::Kind::Takeoff;
    } else if (verb == "land") {
      ev.kind = ScriptEvent::Kind::Land;
    } else if (verb == "mapping") {
      std::string state;
      if (!(fields >> state) || (state != "on" && state != "off")) fail("mapping needs on|off");
      ev.kind = state == "on" ? ScriptEvent::Kind::MappingOn : ScriptEvent::Kind::MappingOff;
    } else {
      fail("unknown command '" + verb + "'");
    }
    std::string extra;
    if (fields >> extra) fail("unexpected token '" + extra + "'");
    events.push_back(ev);
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const ScriptEvent& a, const ScriptEvent& b) { return a.time < b.time; });
  return events;
}

std::vector<ScriptEvent> load_script(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw ScriptError("cannot open script " + path.string());
  std::ostringstream text;
  text << file.rdbuf();
  return parse_script(text.str());
}

}  // namespace vrgcs::station
