#include "station/simulation.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

namespace vrgcs::station {

namespace {

/// True when a periodic event at `rate_hz` falls in the tick ending at `tick`.
bool crosses(std::uint64_t tick, double rate_hz, double physics_hz) {
  const auto before = static_cast<std::uint64_t>(std::floor((tick - 1) * rate_hz / physics_hz));
  const auto after = static_cast<std::uint64_t>(std::floor(tick * rate_hz / physics_hz));
  return after > before;
}

}  // namespace

Simulation::Simulation(ServerConfig config, scan::WorldModel world)
    : config_(std::move(config)),
      world_(std::move(world)),
      map_(config_.voxel_size),
      dt_(1.0 / config_.physics_rate_hz),
      mapping_(config_.mapping_enabled) {
  config_.validate();
  world_.validate();
  trajectory_.push_back(state_);
}

control::FlightMode Simulation::mode() const {
  std::lock_guard lock(pilot_mutex_);
  return pilot_.mode;
}

control::CommandOutcome Simulation::command(control::PilotAction action,
                                            const control::VelocityCommand& cmd) {
  std::lock_guard lock(pilot_mutex_);
  return control::admit(pilot_, action, cmd, shared_state_, config_.limits);
}

Simulation::TickResult Simulation::tick() {
  TickResult result;
  control::Setpoint sp;
  control::FlightMode mode;
  {
    std::lock_guard lock(pilot_mutex_);
    sp = control::velocity_command_to_setpoint(pilot_, state_, config_.limits, dt_);
    mode = pilot_.mode;
  }
  max_setpoint_speed_ = std::max(max_setpoint_speed_, sp.velocity_target.cwiseAbs().maxCoeff());

  if (mode == control::FlightMode::Landed) {
    // Resting on the ground: level, motionless, motors idle.
    const double yaw = dynamics::euler_from_rotation(state_.attitude).yaw;
    state_.attitude = dynamics::rotation_from_euler(0.0, 0.0, yaw);
    state_.velocity.setZero();
    state_.body_rates.setZero();
    state_.position.z() = 0.0;
    state_.time += dt_;
    memory_ = {};
  } else {
    const dynamics::ControlInput input =
        control::control_step(state_, sp, config_.gains, config_.vehicle, memory_);
    state_ = dynamics::step(state_, input, config_.vehicle, dt_);
    if (state_.position.z() < 0.0) {
      state_.position.z() = 0.0;
      state_.velocity.z() = std::max(state_.velocity.z(), 0.0);
    }
  }
  ++ticks_;
  // Tick count is the clock; summing dt drifts.
  state_.time = static_cast<double>(ticks_) * dt_;

  {
    std::lock_guard lock(pilot_mutex_);
    result.touched_down = control::detect_touchdown(pilot_, state_, config_.limits);
    shared_state_ = state_;
  }
  if (record_) trajectory_.push_back(state_);

  if (crosses(ticks_, config_.scan_rate_hz, config_.physics_rate_hz) && mapping_.load()) {
    const scan::Pose body{state_.position, state_.attitude};
    const scan::Pose camera = body.compose(config_.camera.mount);
    const scan::DepthImage image = scan::render_depth(world_, camera, config_.camera, state_.time);
    result.dirty = scan::integrate_scan(map_, image);
    result.scanned = true;
    scan_poses_.push_back(camera);
  }
  result.pose_due = crosses(ticks_, config_.pose_rate_hz, config_.physics_rate_hz);
  return result;
}

ScriptRunner::ScriptRunner(Simulation& sim, std::vector<ScriptEvent> events, double max_tail_s)
    : sim_(sim), events_(std::move(events)) {
  const double last = events_.empty() ? 0.0 : events_.back().time;
  end_time_ = last + max_tail_s;
}

void ScriptRunner::apply_due() {
  const double eps = sim_.dt() * 1e-6;
  while (next_ < events_.size() && events_[next_].time <= sim_.state().time + eps) {
    const ScriptEvent& ev = events_[next_++];
    control::CommandOutcome outcome = control::CommandOutcome::ok();
    switch (ev.kind) {
      case ScriptEvent::Kind::CmdVel:
        outcome = sim_.command(control::PilotAction::Velocity, ev.cmd);
        held_ = ev.cmd;
        break;
      case ScriptEvent::Kind::Takeoff:
        outcome = sim_.command(control::PilotAction::Takeoff);
        held_.reset();
        break;
      case ScriptEvent::Kind::Land:
        outcome = sim_.command(control::PilotAction::Land);
        held_.reset();
        break;
      case ScriptEvent::Kind::MappingOn:
        sim_.set_mapping(true);
        break;
      case ScriptEvent::Kind::MappingOff:
        sim_.set_mapping(false);
        break;
    }
    if (!outcome.accepted)
      spdlog::warn("script event at t={:.3f}s rejected: {}", ev.time, control::to_string(outcome.reason));
  }
  if (held_ && sim_.mode() == control::FlightMode::Flying)
    sim_.command(control::PilotAction::Velocity, *held_);
}

bool ScriptRunner::timed_out() const { return sim_.state().time >= end_time_; }

bool ScriptRunner::done() const {
  if (timed_out()) return true;
  if (next_ < events_.size()) return false;
  return sim_.mode() == control::FlightMode::Landed;
}

Simulation::TickResult ScriptRunner::step() {
  apply_due();
  return sim_.tick();
}

bool ScriptRunner::run() {
  while (!done()) step();
  return !timed_out() || sim_.mode() == control::FlightMode::Landed;
}

}  // namespace vrgcs::station
