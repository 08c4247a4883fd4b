#include "telemetry/latency.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

namespace vrgcs::telemetry {

void LatencyLog::add(const LatencyProbe& probe) {
  if (probe.t_rx_ns < probe.t_tx_ns || probe.one_way_ns != (probe.t_rx_ns - probe.t_tx_ns) / 2)
    throw std::invalid_argument("inconsistent latency probe");
  if (!ids_.insert(probe.id).second)
    throw std::invalid_argument("duplicate probe id " + std::to_string(probe.id));
  auto pos = std::upper_bound(probes_.begin(), probes_.end(), probe,
                              [](const LatencyProbe& a, const LatencyProbe& b) {
                                return a.t_tx_ns < b.t_tx_ns;
                              });
  probes_.insert(pos, probe);
}

void LatencyLog::add_mapping_interval(MappingInterval interval) {
  if (!(interval.start_ns < interval.end_ns)) throw std::invalid_argument("empty mapping interval");
  for (const MappingInterval& i : intervals_)
    if (interval.start_ns < i.end_ns && i.start_ns < interval.end_ns)
      throw std::invalid_argument("overlapping mapping interval");
  auto pos = std::upper_bound(intervals_.begin(), intervals_.end(), interval,
                              [](const MappingInterval& a, const MappingInterval& b) {
                                return a.start_ns < b.start_ns;
                              });
  intervals_.insert(pos, interval);
}

void LatencyLog::begin_mapping(std::uint64_t t_ns) {
  if (!intervals_.empty() && intervals_.back().end_ns == MappingInterval{}.end_ns) return;
  add_mapping_interval({t_ns, MappingInterval{}.end_ns});
}

void LatencyLog::end_mapping(std::uint64_t t_ns) {
  if (intervals_.empty() || intervals_.back().end_ns != MappingInterval{}.end_ns) return;
  MappingInterval& open = intervals_.back();
  if (t_ns <= open.start_ns) {
    intervals_.pop_back();
    return;
  }
  open.end_ns = t_ns;
}

bool LatencyLog::mapping_at(std::uint64_t t_ns) const {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [&](const MappingInterval& i) { return i.contains(t_ns); });
}

namespace {

LatencyStats stats_from_ns(std::vector<std::uint64_t> ns) {
  if (ns.empty()) throw EmptyLogError("latency statistics need at least one probe");
  std::sort(ns.begin(), ns.end());
  LatencyStats s;
  s.count = ns.size();
  long double sum = 0;
  for (std::uint64_t v : ns) sum += v;
  s.mean_ms = static_cast<double>(sum / ns.size() / 1e6L);
  const std::size_t mid = ns.size() / 2;
  s.median_ms = ns.size() % 2 ? ns[mid] / 1e6
                              : (static_cast<long double>(ns[mid - 1]) + ns[mid]) / 2.0L / 1e6L;
  s.max_ms = ns.back() / 1e6;
  return s;
}

}  // namespace

LatencyStats latency_stats(const std::vector<LatencyProbe>& probes) {
  std::vector<std::uint64_t> ns;
  ns.reserve(probes.size());
  for (const LatencyProbe& p : probes) ns.push_back(p.one_way_ns);
  return stats_from_ns(std::move(ns));
}

LatencyStats latency_stats(const LatencyLog& log) { return latency_stats(log.probes()); }

LatencyStats latency_stats(const std::vector<CsvRow>& rows) {
  std::vector<std::uint64_t> ns;
  ns.reserve(rows.size());
  for (const CsvRow& r : rows) ns.push_back(r.one_way_ns);
  return stats_from_ns(std::move(ns));
}

std::string format_ms(std::uint64_t ns) {
  std::string frac = std::to_string(ns % 1'000'000);
  return std::to_string(ns / 1'000'000) + "." + std::string(6 - frac.size(), '0') + frac;
}

std::uint64_t parse_ms(const std::string& text) {
  const auto dot = text.find('.');
  const std::string whole = text.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
  if (frac.size() > 6) throw std::invalid_argument("sub-nanosecond precision in '" + text + "'");
  frac.append(6 - frac.size(), '0');
  std::uint64_t w = 0, f = 0;
  auto parse = [&](const std::string& s, std::uint64_t& out) {
    if (s.empty()) {
      out = 0;
      return;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw std::invalid_argument("bad millisecond value '" + text + "'");
  };
  parse(whole, w);
  parse(frac, f);
  if (whole.empty() && dot == std::string::npos) throw std::invalid_argument("empty value");
  return w * 1'000'000 + f;
}

std::vector<CsvRow> csv_rows(const LatencyLog& log) {
  std::vector<CsvRow> rows;
  rows.reserve(log.probes().size());
  for (const LatencyProbe& p : log.probes())
    rows.push_back({p.id, p.t_tx_ns, p.one_way_ns, log.mapping_at(p.t_tx_ns)});
  return rows;
}

void export_csv(const LatencyLog& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "probe_id,t_tx_ns,one_way_ms,mapping_enabled\n";
  for (const CsvRow& r : csv_rows(log))
    out << r.probe_id << ',' << r.t_tx_ns << ',' << format_ms(r.one_way_ns) << ','
        << (r.mapping_enabled ? 1 : 0) << '\n';
  if (!out.flush()) throw std::runtime_error("write failed for " + path.string());
}

std::vector<CsvRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "probe_id,t_tx_ns,one_way_ms,mapping_enabled")
    throw std::runtime_error(path.string() + ": missing latency CSV header");
  std::vector<CsvRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 4 || (cells[3] != "0" && cells[3] != "1"))
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": malformed row");
    try {
      rows.push_back({std::stoull(cells[0]), std::stoull(cells[1]), parse_ms(cells[2]), cells[3] == "1"});
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace vrgcs::telemetry
