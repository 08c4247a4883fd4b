#include "station/server.hpp"

#include "station/simulation.hpp"
#include "wire/mesh_codec.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include <Eigen/Geometry>

#include <atomic>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <system_error>
#include <thread>

namespace vrgcs::station {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

using Bytes = std::shared_ptr<const std::vector<std::uint8_t>>;

struct StoredChunk {
  std::uint32_t revision = 0;
  Bytes frame;
};

struct Outgoing {
  enum class Kind { Text, Pose, Chunk };
  Kind kind = Kind::Text;
  bool urgent = false;
  std::string text;
  wire::Pose pose;
  scan::ChunkCoord coords;
  std::uint32_t revision = 0;
  Bytes frame;
};

wire::Pose pose_message(const dynamics::VehicleState& s) {
  wire::Pose pose;
  pose.t_ns = static_cast<std::uint64_t>(std::llround(s.time * 1e9));
  pose.p = {s.position.x(), s.position.y(), s.position.z()};
  Eigen::Quaterniond q(s.attitude);
  q.normalize();
  pose.q = {q.w(), q.x(), q.y(), q.z()};
  return pose;
}

}  // namespace

class Session;

struct GroundStation::Impl {
  Impl(ServerConfig cfg, scan::WorldModel world, Options opts)
      : config(std::move(cfg)),
        options(std::move(opts)),
        sim(config, std::move(world)),
        acceptor(ioc),
        probe_timer(ioc),
        epoch(std::chrono::steady_clock::now()) {
    sim.set_record_trajectory(options.script.has_value());
    if (sim.mapping()) latency.begin_mapping(0);
  }

  std::uint64_t now_ns() const {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - epoch)
            .count());
  }

  void do_accept();
  void schedule_probe();
  void sim_loop();
  void broadcast_chunks(const std::set<scan::ChunkCoord>& dirty);
  void broadcast_pose();
  void record_mapping(bool enabled);

  // Called on the io thread by sessions.
  void register_session(const std::shared_ptr<Session>& s);
  void remove_session(std::uint64_t id);
  void resolve_pong(std::uint64_t session_id, const wire::Pong& pong);
  void chunk_delivered(std::uint64_t session_id, const scan::ChunkCoord& c, std::uint32_t rev);
  void pose_delivered(std::uint64_t session_id);
  std::optional<double> session_latency(std::uint64_t session_id);
  control::CommandOutcome ingest(std::uint64_t session_id, const wire::Envelope& env);

  ServerConfig config;
  Options options;
  Simulation sim;

  net::io_context ioc;
  tcp::acceptor acceptor;
  net::steady_timer probe_timer;
  std::chrono::steady_clock::time_point epoch;

  std::thread io_thread;
  std::thread sim_thread;
  std::atomic<bool> stop_requested{false};
  std::atomic<bool> finished_flag{false};
  std::atomic<std::uint64_t> next_session_id{1};
  std::uint16_t bound_port = 0;
  bool started = false;
  bool stopped = false;

  mutable std::mutex mu;
  std::condition_variable finished_cv;
  std::map<scan::ChunkCoord, StoredChunk> chunks;
  std::map<std::uint64_t, std::shared_ptr<Session>> sessions;
  std::map<std::uint64_t, SessionInfo> infos;
  std::optional<std::uint64_t> authority;
  telemetry::LatencyLog latency;
  struct Outstanding {
    std::uint64_t session = 0;
    std::uint64_t t_tx_ns = 0;
  };
  std::map<std::uint64_t, Outstanding> outstanding;
  std::uint64_t next_probe_id = 1;
  std::optional<telemetry::MissionReport> report;
  std::vector<dynamics::VehicleState> final_trajectory;
};

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(GroundStation::Impl& owner, tcp::socket socket, std::uint64_t id)
      : owner_(owner), ws_(std::move(socket)), id_(id) {}

  std::uint64_t id() const { return id_; }
  bool greeted() const { return greeted_; }

  void run() {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().set_option(tcp::no_delay(true), ec);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(beast::bind_front_handler(&Session::on_accept, shared_from_this()));
  }

  void enqueue(Outgoing item) {
    if (closed_) return;
    const std::size_t first_pending = writing_ ? 1 : 0;
    if (item.kind == Outgoing::Kind::Pose || item.kind == Outgoing::Kind::Chunk) {
      for (std::size_t i = first_pending; i < queue_.size(); ++i) {
        Outgoing& pending = queue_[i];
        if (pending.kind != item.kind) continue;
        if (item.kind == Outgoing::Kind::Pose) {
          pending = std::move(item);
          return;
        }
        if (pending.coords == item.coords) {
          if (item.revision > pending.revision) pending = std::move(item);
          return;
        }
      }
      queue_.push_back(std::move(item));
    } else if (item.urgent) {
      std::size_t pos = first_pending;
      while (pos < queue_.size() && queue_[pos].urgent) ++pos;
      queue_.insert(queue_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(item));
    } else {
      queue_.push_back(std::move(item));
    }
    do_write();
  }

  void shutdown() {
    closed_ = true;
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return fail("accept", ec);
    do_read();
  }

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&Session::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return fail("read", ec);
    if (ws_.got_text()) {
      const std::string text = beast::buffers_to_string(buffer_.data());
      buffer_.consume(buffer_.size());
      handle_text(text);
    } else {
      buffer_.consume(buffer_.size());
    }
    if (!closed_) do_read();
  }

  void handle_text(const std::string& text) {
    wire::Envelope env;
    try {
      env = wire::decode_message(text);
    } catch (const wire::MessageError& e) {
      spdlog::debug("session {}: dropped malformed message: {}", id_, e.what());
      return;
    }

    if (!greeted_) {
      const auto* hello = std::get_if<wire::Hello>(&env);
      if (!hello) return close_with("expected hello");
      if (hello->protocol_version != wire::kProtocolVersion) return close_with("protocol-version mismatch");
      greeted_ = true;
      owner_.register_session(shared_from_this());
      return;
    }

    if (const auto* ping = std::get_if<wire::Ping>(&env)) {
      Outgoing out;
      out.urgent = true;
      out.text = wire::encode_message(wire::Pong{ping->id, ping->t_tx_ns});
      enqueue(std::move(out));
    } else if (const auto* pong = std::get_if<wire::Pong>(&env)) {
      owner_.resolve_pong(id_, *pong);
    } else if (std::holds_alternative<wire::CmdVel>(env) || std::holds_alternative<wire::Takeoff>(env) ||
               std::holds_alternative<wire::Land>(env)) {
      const control::CommandOutcome outcome = owner_.ingest(id_, env);
      if (!outcome.accepted)
        spdlog::info("session {}: {} rejected: {}", id_, wire::type_name(env), control::to_string(outcome.reason));
    } else {
      spdlog::debug("session {}: ignored {}", id_, wire::type_name(env));
    }
  }

  void close_with(const std::string& reason) {
    closed_ = true;
    spdlog::info("session {}: closing: {}", id_, reason);
    ws_.async_close(websocket::close_reason(websocket::close_code::policy_error, reason),
                    [self = shared_from_this()](beast::error_code) {});
  }

  void do_write() {
    if (writing_ || queue_.empty() || closed_) return;
    writing_ = true;
    Outgoing& item = queue_.front();
    switch (item.kind) {
      case Outgoing::Kind::Text:
        scratch_ = item.text;
        break;
      case Outgoing::Kind::Pose: {
        wire::Pose pose = item.pose;
        pose.latency_ms = owner_.session_latency(id_);
        scratch_ = wire::encode_message(pose);
        break;
      }
      case Outgoing::Kind::Chunk:
        scratch_ = wire::encode_message(wire::ChunkNotice{item.coords, item.revision});
        break;
    }
    ws_.text(true);
    ws_.async_write(net::buffer(scratch_), beast::bind_front_handler(&Session::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) return fail("write", ec);
    Outgoing& item = queue_.front();
    if (item.kind == Outgoing::Kind::Chunk && !binary_phase_) {
      binary_phase_ = true;
      binary_ = item.frame;
      ws_.binary(true);
      ws_.async_write(net::buffer(*binary_), beast::bind_front_handler(&Session::on_write, shared_from_this()));
      return;
    }
    if (item.kind == Outgoing::Kind::Chunk) owner_.chunk_delivered(id_, item.coords, item.revision);
    if (item.kind == Outgoing::Kind::Pose) owner_.pose_delivered(id_);
    binary_phase_ = false;
    binary_.reset();
    queue_.pop_front();
    writing_ = false;
    do_write();
  }

  void fail(const char* what, beast::error_code ec) {
    if (ec != websocket::error::closed && ec != net::error::operation_aborted && ec != net::error::eof)
      spdlog::debug("session {}: {}: {}", id_, what, ec.message());
    closed_ = true;
    queue_.clear();
    writing_ = false;
    owner_.remove_session(id_);
  }

  GroundStation::Impl& owner_;
  websocket::stream<beast::tcp_stream> ws_;
  std::uint64_t id_;
  beast::flat_buffer buffer_;
  std::deque<Outgoing> queue_;
  std::string scratch_;
  Bytes binary_;
  bool writing_ = false;
  bool binary_phase_ = false;
  bool greeted_ = false;
  bool closed_ = false;
};

void GroundStation::Impl::do_accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) {
      if (ec != net::error::operation_aborted) spdlog::warn("accept failed: {}", ec.message());
      if (!acceptor.is_open()) return;
    } else {
      const std::uint64_t id = next_session_id++;
      auto session = std::make_shared<Session>(*this, std::move(socket), id);
      {
        std::lock_guard lock(mu);
        infos[id].id = id;
      }
      session->run();
    }
    do_accept();
  });
}

void GroundStation::Impl::register_session(const std::shared_ptr<Session>& s) {
  wire::Hello hello;
  hello.world_name = sim.world().name;
  hello.viewer_offset_m = config.viewer_offset_m;
  std::vector<Outgoing> replay;
  {
    std::lock_guard lock(mu);
    for (const auto& [coords, stored] : chunks) {
      hello.chunk_list.push_back({coords, stored.revision});
      Outgoing out;
      out.kind = Outgoing::Kind::Chunk;
      out.coords = coords;
      out.revision = stored.revision;
      out.frame = stored.frame;
      replay.push_back(std::move(out));
    }
    sessions[s->id()] = s;
    SessionInfo& info = infos[s->id()];
    info.id = s->id();
    info.subscribed = true;
    if (!options.script && !authority) {
      authority = s->id();
      info.control_authority = true;
    }
  }
  spdlog::info("session {}: subscribed, replaying {} chunks", s->id(), replay.size());
  Outgoing greeting;
  greeting.text = wire::encode_message(hello);
  s->enqueue(std::move(greeting));
  for (Outgoing& out : replay) s->enqueue(std::move(out));
}

void GroundStation::Impl::remove_session(std::uint64_t id) {
  std::lock_guard lock(mu);
  sessions.erase(id);
  auto it = infos.find(id);
  if (it != infos.end()) {
    it->second.subscribed = false;
    it->second.control_authority = false;
  }
  if (authority == id) {
    authority.reset();
    // Hand control to the longest-connected remaining session.
    if (!sessions.empty()) {
      authority = sessions.begin()->first;
      infos[*authority].control_authority = true;
    }
  }
}

void GroundStation::Impl::resolve_pong(std::uint64_t session_id, const wire::Pong& pong) {
  const std::uint64_t t_rx = now_ns();
  std::lock_guard lock(mu);
  auto it = outstanding.find(pong.id);
  if (it == outstanding.end() || it->second.session != session_id || it->second.t_tx_ns != pong.t_tx_ns) return;
  outstanding.erase(it);
  const wire::LatencyProbe probe = wire::make_probe(pong.id, pong.t_tx_ns, t_rx);
  latency.add(probe);
  infos[session_id].last_latency_ms = static_cast<double>(probe.one_way_ns) / 1e6;
}

void GroundStation::Impl::chunk_delivered(std::uint64_t session_id, const scan::ChunkCoord& c,
                                          std::uint32_t rev) {
  std::lock_guard lock(mu);
  SessionInfo& info = infos[session_id];
  ++info.chunks_sent;
  std::uint32_t& acked = info.acked_revisions[c];
  acked = std::max(acked, rev);
}

void GroundStation::Impl::pose_delivered(std::uint64_t session_id) {
  std::lock_guard lock(mu);
  ++infos[session_id].poses_sent;
}

std::optional<double> GroundStation::Impl::session_latency(std::uint64_t session_id) {
  std::lock_guard lock(mu);
  return infos[session_id].last_latency_ms;
}

control::CommandOutcome GroundStation::Impl::ingest(std::uint64_t session_id, const wire::Envelope& env) {
  if (!std::holds_alternative<wire::CmdVel>(env) && !std::holds_alternative<wire::Takeoff>(env) &&
      !std::holds_alternative<wire::Land>(env))
    throw std::invalid_argument("not a pilot command: " + std::string(wire::type_name(env)));
  std::lock_guard lock(mu);
  control::CommandOutcome outcome;
  if (authority != session_id) {
    outcome = control::CommandOutcome::rejected(control::RejectReason::NoAuthority);
  } else if (const auto* v = std::get_if<wire::CmdVel>(&env)) {
    outcome = sim.command(control::PilotAction::Velocity, {v->vx, v->vy, v->vz, v->yaw_rate});
  } else if (std::holds_alternative<wire::Takeoff>(env)) {
    outcome = sim.command(control::PilotAction::Takeoff);
  } else {
    outcome = sim.command(control::PilotAction::Land);
  }
  const auto found = infos.find(session_id);
  if (found == infos.end()) return outcome;
  SessionInfo& info = found->second;
  if (outcome.accepted)
    ++info.commands_accepted;
  else if (outcome.reason == control::RejectReason::NoAuthority)
    ++info.rejected_no_authority;
  else
    ++info.rejected_not_armed;
  return outcome;
}

void GroundStation::Impl::schedule_probe() {
  probe_timer.expires_after(std::chrono::nanoseconds(static_cast<std::int64_t>(1e9 / config.probe_rate_hz)));
  probe_timer.async_wait([this](beast::error_code ec) {
    if (ec) return;
    std::vector<std::pair<std::shared_ptr<Session>, wire::Ping>> pings;
    {
      std::lock_guard lock(mu);
      const std::uint64_t now = now_ns();
      for (auto it = outstanding.begin(); it != outstanding.end();) {
        if (now - it->second.t_tx_ns > 10'000'000'000ULL)
          it = outstanding.erase(it);
        else
          ++it;
      }
      for (const auto& [id, session] : sessions) {
        const wire::Ping ping{next_probe_id++, now_ns()};
        outstanding[ping.id] = {id, ping.t_tx_ns};
        pings.emplace_back(session, ping);
      }
    }
    for (auto& [session, ping] : pings) {
      Outgoing out;
      out.urgent = true;
      out.text = wire::encode_message(ping);
      session->enqueue(std::move(out));
    }
    schedule_probe();
  });
}

void GroundStation::Impl::broadcast_chunks(const std::set<scan::ChunkCoord>& dirty) {
  std::vector<Outgoing> items;
  items.reserve(dirty.size());
  for (const scan::ChunkCoord& c : dirty) {
    const scan::MeshChunk mesh = scan::extract_chunk_mesh(sim.map(), c);
    Outgoing out;
    out.kind = Outgoing::Kind::Chunk;
    out.coords = c;
    out.revision = mesh.revision;
    out.frame = std::make_shared<const std::vector<std::uint8_t>>(wire::frame_binary(wire::encode_mesh_chunk(mesh)));
    items.push_back(std::move(out));
  }
  std::vector<std::shared_ptr<Session>> targets;
  {
    std::lock_guard lock(mu);
    for (const Outgoing& out : items) chunks[out.coords] = {out.revision, out.frame};
    for (const auto& entry : sessions) targets.push_back(entry.second);
  }
  if (targets.empty()) return;
  net::post(ioc, [targets = std::move(targets), items = std::move(items)]() {
    for (const auto& session : targets)
      for (const Outgoing& out : items) session->enqueue(out);
  });
}

void GroundStation::Impl::broadcast_pose() {
  std::vector<std::shared_ptr<Session>> targets;
  {
    std::lock_guard lock(mu);
    for (const auto& entry : sessions) targets.push_back(entry.second);
  }
  if (targets.empty()) return;
  Outgoing out;
  out.kind = Outgoing::Kind::Pose;
  out.pose = pose_message(sim.state());
  net::post(ioc, [targets = std::move(targets), out = std::move(out)]() {
    for (const auto& session : targets) session->enqueue(out);
  });
}

void GroundStation::Impl::record_mapping(bool enabled) {
  std::lock_guard lock(mu);
  if (enabled)
    latency.begin_mapping(now_ns());
  else
    latency.end_mapping(now_ns());
}

void GroundStation::Impl::sim_loop() {
  std::optional<ScriptRunner> runner;
  if (options.script) runner.emplace(sim, *options.script, options.script_tail_s);
  const auto wall_start = std::chrono::steady_clock::now();
  bool mapping = sim.mapping();
  try {
    while (!stop_requested.load()) {
      if (runner) {
        if (runner->done()) break;
        runner->apply_due();
      }
      const Simulation::TickResult r = sim.tick();
      if (sim.mapping() != mapping) {
        mapping = sim.mapping();
        record_mapping(mapping);
      }
      if (!r.dirty.empty()) broadcast_chunks(r.dirty);
      if (r.pose_due) broadcast_pose();
      if (!options.fast)
        std::this_thread::sleep_until(wall_start +
                                      std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                          std::chrono::duration<double>(sim.state().time)));
    }
  } catch (const std::exception& e) {
    spdlog::error("simulation stopped: {}", e.what());
  }

  if (runner) {
    if (runner->timed_out() && sim.mode() != control::FlightMode::Landed)
      spdlog::warn("script tail limit reached before touchdown");
    std::lock_guard lock(mu);
    final_trajectory = sim.trajectory();
    try {
      report = telemetry::evaluate_mission(final_trajectory, sim.world(), {}, &latency);
    } catch (const std::exception& e) {
      spdlog::error("mission evaluation failed: {}", e.what());
    }
  }
  {
    std::lock_guard lock(mu);
    finished_flag = true;
  }
  finished_cv.notify_all();
}

GroundStation::GroundStation(ServerConfig config, scan::WorldModel world, Options options)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(world), std::move(options))) {}

GroundStation::~GroundStation() { stop(); }

void GroundStation::start() {
  Impl& s = *impl_;
  if (s.started) throw std::logic_error("ground station already started");
  beast::error_code ec;
  const auto address = net::ip::make_address(s.config.listen_address, ec);
  if (ec) throw std::system_error(std::make_error_code(std::errc::invalid_argument),
                                  "bad listen address " + s.config.listen_address);
  const tcp::endpoint endpoint(address, s.config.port);
  auto check = [&](const char* what) {
    if (!ec) return;
    beast::error_code ignored;
    s.acceptor.close(ignored);
    throw std::system_error(std::error_code(ec.value(), std::system_category()), what);
  };
  s.acceptor.open(endpoint.protocol(), ec);
  check("open");
  s.acceptor.set_option(net::socket_base::reuse_address(true), ec);
  check("set_option");
  s.acceptor.bind(endpoint, ec);
  check("bind");
  s.acceptor.listen(net::socket_base::max_listen_connections, ec);
  check("listen");
  s.bound_port = s.acceptor.local_endpoint().port();
  s.started = true;
  spdlog::info("ground station listening on {}:{}", s.config.listen_address, s.bound_port);

  s.do_accept();
  s.schedule_probe();
  s.io_thread = std::thread([&s] { s.ioc.run(); });
  s.sim_thread = std::thread([&s] { s.sim_loop(); });
}

std::uint16_t GroundStation::port() const { return impl_->bound_port; }

bool GroundStation::wait_for(std::chrono::milliseconds timeout) {
  std::unique_lock lock(impl_->mu);
  return impl_->finished_cv.wait_for(lock, timeout, [this] { return impl_->finished_flag.load(); });
}

bool GroundStation::finished() const { return impl_->finished_flag.load(); }

void GroundStation::stop() {
  Impl& s = *impl_;
  if (!s.started || s.stopped) return;
  s.stopped = true;
  s.stop_requested = true;
  if (s.sim_thread.joinable()) s.sim_thread.join();
  net::post(s.ioc, [&s] {
    beast::error_code ec;
    s.acceptor.close(ec);
    s.probe_timer.cancel();
    std::vector<std::shared_ptr<Session>> live;
    {
      std::lock_guard lock(s.mu);
      for (const auto& entry : s.sessions) live.push_back(entry.second);
      s.sessions.clear();
      s.authority.reset();
    }
    for (const auto& session : live) session->shutdown();
  });
  net::post(s.ioc, [&s] { s.ioc.stop(); });
  if (s.io_thread.joinable()) s.io_thread.join();
}

void GroundStation::set_mapping(bool enabled) {
  impl_->sim.set_mapping(enabled);
  impl_->record_mapping(enabled);
}

control::CommandOutcome GroundStation::ingest_command(std::uint64_t session_id, const wire::Envelope& env) {
  return impl_->ingest(session_id, env);
}

std::vector<SessionInfo> GroundStation::sessions() const {
  std::lock_guard lock(impl_->mu);
  std::vector<SessionInfo> out;
  for (const auto& [id, info] : impl_->infos)
    if (info.subscribed) out.push_back(info);
  return out;
}

telemetry::LatencyLog GroundStation::latency_log() const {
  std::lock_guard lock(impl_->mu);
  return impl_->latency;
}

std::size_t GroundStation::chunk_count() const {
  std::lock_guard lock(impl_->mu);
  return impl_->chunks.size();
}

std::optional<telemetry::MissionReport> GroundStation::mission_report() const {
  std::lock_guard lock(impl_->mu);
  return impl_->report;
}

std::vector<dynamics::VehicleState> GroundStation::trajectory() const {
  std::lock_guard lock(impl_->mu);
  return impl_->final_trajectory;
}

std::uint64_t GroundStation::now_ns() const { return impl_->now_ns(); }

}  // namespace vrgcs::station
