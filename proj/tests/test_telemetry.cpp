#include "telemetry/latency.hpp"
#include "telemetry/mission.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace vrgcs;
using namespace vrgcs::telemetry;

namespace {

LatencyProbe probe_ms(std::uint64_t id, double ms, std::uint64_t t_tx = 0) {
  const auto one_way = static_cast<std::uint64_t>(ms * 1e6);
  return {id, t_tx, t_tx + 2 * one_way, one_way};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("vrgcs_test_" + name);
}

std::vector<dynamics::VehicleState> line_trajectory(double dt, int n, const Eigen::Vector3d& velocity) {
  std::vector<dynamics::VehicleState> out;
  dynamics::VehicleState s;
  for (int i = 0; i < n; ++i) {
    s.time = i * dt;
    s.position = velocity * s.time;
    s.velocity = velocity;
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("latency statistics examples") {
  auto st = latency_stats(std::vector<LatencyProbe>{probe_ms(1, 10)});
  CHECK(st.mean_ms == 10.0);
  CHECK(st.median_ms == 10.0);
  CHECK(st.max_ms == 10.0);

  st = latency_stats(std::vector<LatencyProbe>{probe_ms(1, 10), probe_ms(2, 20), probe_ms(3, 100)});
  CHECK(st.mean_ms == doctest::Approx(43.333333333).epsilon(1e-9));
  CHECK(st.median_ms == 20.0);
  CHECK(st.max_ms == 100.0);
  CHECK(st.median_ms < st.mean_ms);

  st = latency_stats(std::vector<LatencyProbe>{probe_ms(1, 40), probe_ms(2, 10), probe_ms(3, 30), probe_ms(4, 20)});
  CHECK(st.median_ms == 25.0);
  CHECK(st.count == 4);

  CHECK_THROWS_AS(latency_stats(std::vector<LatencyProbe>{}), EmptyLogError);
  CHECK_THROWS_AS(latency_stats(LatencyLog{}), EmptyLogError);
}

TEST_CASE("log keeps probes ordered and unique") {
  LatencyLog log;
  log.add(probe_ms(2, 5, 200));
  log.add(probe_ms(1, 5, 100));
  log.add(probe_ms(3, 5, 300));
  CHECK(log.probes()[0].id == 1);
  CHECK(log.probes()[2].id == 3);
  CHECK_THROWS_AS(log.add(probe_ms(2, 7, 400)), std::invalid_argument);
  LatencyProbe inconsistent = probe_ms(9, 5);
  inconsistent.one_way_ns += 1;
  CHECK_THROWS_AS(log.add(inconsistent), std::invalid_argument);
}

TEST_CASE("mapping intervals") {
  LatencyLog log;
  log.add_mapping_interval({100, 200});
  log.add_mapping_interval({300, 400});
  CHECK_THROWS_AS(log.add_mapping_interval({150, 250}), std::invalid_argument);
  CHECK_THROWS_AS(log.add_mapping_interval({50, 50}), std::invalid_argument);
  CHECK(log.mapping_at(100));
  CHECK_FALSE(log.mapping_at(200));
  CHECK_FALSE(log.mapping_at(250));
  log.begin_mapping(500);
  log.begin_mapping(600);
  CHECK(log.mapping_intervals().size() == 3);
  CHECK(log.mapping_at(1'000'000));
  log.end_mapping(700);
  CHECK_FALSE(log.mapping_at(700));
  CHECK(log.mapping_intervals().back() == MappingInterval{500, 700});
}

TEST_CASE("millisecond formatting is exact") {
  CHECK(format_ms(42'000'500) == "42.000500");
  CHECK(format_ms(0) == "0.000000");
  CHECK(format_ms(1) == "0.000001");
  CHECK(parse_ms("42.000500") == 42'000'500);
  CHECK(parse_ms("7") == 7'000'000);
  CHECK_THROWS_AS(parse_ms("1.0000001"), std::invalid_argument);
  CHECK_THROWS_AS(parse_ms("abc"), std::invalid_argument);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::uint64_t> ns(0, 1ull << 50);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t v = ns(rng);
    REQUIRE(parse_ms(format_ms(v)) == v);
  }
}

TEST_CASE("CSV export parses back exactly") {
  LatencyLog log;
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::uint64_t> rtt(0, 400'000'000);
  std::uint64_t t = 1'000;
  for (std::uint64_t id = 1; id <= 200; ++id) {
    log.add(wire::make_probe(id, t, t + rtt(rng)));
    t += 100'000'000;
  }
  log.add_mapping_interval({3'000'000'000ull, 9'000'000'000ull});

  const auto path = temp_file("latency.csv");
  export_csv(log, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "probe_id,t_tx_ns,one_way_ms,mapping_enabled");

  const auto rows = read_csv(path);
  CHECK(rows.size() == log.probes().size());
  CHECK(rows == csv_rows(log));
  const auto a = latency_stats(rows);
  const auto b = latency_stats(log);
  CHECK(a.mean_ms == b.mean_ms);
  CHECK(a.median_ms == b.median_ms);
  CHECK(a.max_ms == b.max_ms);
  std::size_t mapped = 0;
  for (const auto& r : rows) mapped += r.mapping_enabled;
  CHECK(mapped == 60);
  std::filesystem::remove(path);
}

TEST_CASE("CSV reader rejects malformed files") {
  const auto path = temp_file("bad.csv");
  {
    std::ofstream out(path);
    out << "id,when\n1,2\n";
  }
  CHECK_THROWS(read_csv(path));
  {
    std::ofstream out(path);
    out << "probe_id,t_tx_ns,one_way_ms,mapping_enabled\n1,2,3.0,7\n";
  }
  CHECK_THROWS(read_csv(path));
  std::filesystem::remove(path);
  CHECK_THROWS(read_csv(path));
}

TEST_CASE("mission: a vehicle that never moves") {
  const scan::WorldModel world = scan::parse_world("box 4.8 -2 0 5.0 2 3\n");
  const auto traj = line_trajectory(0.002, 1000, Eigen::Vector3d::Zero());
  const MissionReport r = evaluate_mission(traj, world);
  CHECK(r.min_wall_clearance == doctest::Approx(4.8));
  CHECK(r.return_error == 0.0);
  CHECK(r.touchdown_speed == 0.0);
  CHECK(r.passed);
  CHECK(r.max_latency_ms == 0.0);
}

TEST_CASE("mission: failure conditions") {
  const scan::WorldModel world = scan::parse_world("box 4.8 -2 0 5.0 2 3\n");
  auto traj = line_trajectory(0.002, 2500, Eigen::Vector3d(1, 0, 0));  // ends 5 m out, into the wall
  MissionReport r = evaluate_mission(traj, world);
  CHECK(r.min_wall_clearance == 0.0);
  CHECK(r.return_error == doctest::Approx(4.998));
  CHECK_FALSE(r.passed);

  traj = line_trajectory(0.002, 100, Eigen::Vector3d(0, 0, 1));  // never lands
  r = evaluate_mission(traj, world);
  CHECK(r.touchdown_speed == INFINITY);
  CHECK_FALSE(r.passed);

  traj = line_trajectory(0.002, 100, Eigen::Vector3d::Zero());
  traj.back().velocity.z() = -0.5;  // hard contact
  traj.back().position.z() = 0.0;
  for (auto& s : traj) s.position.z() = 1.0;
  traj.back().position.z() = 0.0;
  r = evaluate_mission(traj, world);
  CHECK(r.touchdown_speed == 0.5);
  CHECK_FALSE(r.passed);
}

TEST_CASE("mission: trajectory gaps and purity") {
  const scan::WorldModel world = scan::parse_world("box 4.8 -2 0 5.0 2 3\n");
  auto traj = line_trajectory(0.002, 100, Eigen::Vector3d::Zero());
  traj.erase(traj.begin() + 10, traj.begin() + 70);
  CHECK_THROWS_AS(evaluate_mission(traj, world), TrajectoryGapError);
  CHECK_THROWS_AS(evaluate_mission(std::vector<dynamics::VehicleState>{}, world), TrajectoryGapError);

  const auto ok = line_trajectory(0.05, 100, Eigen::Vector3d(0.01, 0, 0));
  LatencyLog log;
  log.add(probe_ms(1, 10));
  log.add(probe_ms(2, 30));
  const MissionReport a = evaluate_mission(ok, world, {}, &log);
  const MissionReport b = evaluate_mission(ok, world, {}, &log);
  CHECK(a.min_wall_clearance == b.min_wall_clearance);
  CHECK(a.return_error == b.return_error);
  CHECK(a.touchdown_speed == b.touchdown_speed);
  CHECK(a.passed == b.passed);
  CHECK(a.mean_latency_ms == 20.0);
  CHECK(a.max_latency_ms == 30.0);
}
