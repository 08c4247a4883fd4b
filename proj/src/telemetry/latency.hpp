#pragma once

#include "wire/messages.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace vrgcs::telemetry {

using wire::LatencyProbe;

struct MappingInterval {
  std::uint64_t start_ns = 0;
  std::uint64_t end_ns = std::numeric_limits<std::uint64_t>::max();  // open while mapping

  bool contains(std::uint64_t t_ns) const { return t_ns >= start_ns && t_ns < end_ns; }
  bool operator==(const MappingInterval&) const = default;
};

/// Probes ordered by send time plus the intervals during which mapping was
/// running. Not synchronized; the owner serializes access.
class LatencyLog {
 public:
  /// Throws std::invalid_argument on a duplicate probe id.
  void add(const LatencyProbe& probe);

  /// Throws std::invalid_argument if the interval overlaps an existing one
  /// or is empty.
  void add_mapping_interval(MappingInterval interval);
  void begin_mapping(std::uint64_t t_ns);
  void end_mapping(std::uint64_t t_ns);

  bool mapping_at(std::uint64_t t_ns) const;

  const std::vector<LatencyProbe>& probes() const { return probes_; }
  const std::vector<MappingInterval>& mapping_intervals() const { return intervals_; }
  bool empty() const { return probes_.empty(); }

 private:
  std::vector<LatencyProbe> probes_;
  std::unordered_set<std::uint64_t> ids_;
  std::vector<MappingInterval> intervals_;
};

struct LatencyStats {
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double max_ms = 0.0;
  std::size_t count = 0;
};

class EmptyLogError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mean, exact median (midpoint for even counts) and max of one-way latency.
LatencyStats latency_stats(const std::vector<LatencyProbe>& probes);
LatencyStats latency_stats(const LatencyLog& log);

/// Exact decimal milliseconds of an integer nanosecond count ("42.000500").
std::string format_ms(std::uint64_t ns);
std::uint64_t parse_ms(const std::string& text);

struct CsvRow {
  std::uint64_t probe_id = 0;
  std::uint64_t t_tx_ns = 0;
  std::uint64_t one_way_ns = 0;
  bool mapping_enabled = false;

  bool operator==(const CsvRow&) const = default;
};

std::vector<CsvRow> csv_rows(const LatencyLog& log);

/// Header `probe_id,t_tx_ns,one_way_ms,mapping_enabled`, one row per probe.
void export_csv(const LatencyLog& log, const std::filesystem::path& path);
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

LatencyStats latency_stats(const std::vector<CsvRow>& rows);

}  // namespace vrgcs::telemetry
