#include "ced/harness/presets.hpp"

#include <fmt/format.h>

#include "ced/common/error.hpp"

namespace ced::harness {

const std::vector<QuerySpec>& standard_queries() {
  static const std::vector<QuerySpec> q = {
      {"Q1", "SELECT t1 FROM dev WHERE t1='v999'", 1},
      {"Q2", "SELECT t3 FROM dev WHERE t3=497.44467", 1},
      {"Q3", "SELECT t1, t3 FROM dev", 1},
      {"Q4", "SELECT count(t1) FROM dev GROUP BY 5m", 1},
      {"Q5", "SELECT max_value(t3) FROM dev GROUP BY 5m", 1},
  };
  return q;
}

QuerySpec standard_query(const std::string& name) {
  for (const auto& q : standard_queries())
    if (q.name == name) return q;
  throw CedError(ErrorCode::kInvalidConfig, "unknown standard query " + name);
}

ScenarioConfig base_scenario() {
  ScenarioConfig s;
  s.workload.sensor_count = 9;
  s.workload.sampling_interval_ms = 100;
  s.workload.total_rows = 360'000;  // ~50 MB across nine sensors
  s.workload.seed = 7;
  s.link.bandwidth_mbps = 1000;
  s.link.rtt_ms = 1;
  s.link.seed = 7;
  s.preload = {"queries"};
  return s;
}

namespace {

std::string tag(Mode m) { return std::string(mode_name(m)); }

ScenarioConfig single(const QuerySpec& q, Mode mode) {
  auto s = base_scenario();
  s.mode = mode;
  s.queries = {q};
  return s;
}

}  // namespace

ScenarioConfig io_case(const QuerySpec& q, Mode mode, double throttle) {
  auto s = single(q, mode);
  s.edge.io_throttle = throttle;
  s.name = fmt::format("io/throttle={}/{}/{}", throttle, q.name, tag(mode));
  return s;
}

ScenarioConfig cpu_case(const QuerySpec& q, Mode mode, int concurrency) {
  auto s = single(q, mode);
  s.queries[0].concurrency = concurrency;
  // Synthetic co-located load; kept above low_watermark so offloaded work is not pulled back.
  s.edge.cpu_load = 0.6;
  s.name = fmt::format("cpu/concurrency={}/{}/{}", concurrency, q.name, tag(mode));
  return s;
}

ScenarioConfig bandwidth_case(const QuerySpec& q, double mbps) {
  auto s = single(q, Mode::kCollaborative);
  s.edge.io_throttle = 10;
  s.link.bandwidth_mbps = mbps;
  s.name = fmt::format("bandwidth/mbps={}/{}", mbps, q.name);
  return s;
}

ScenarioConfig forced_case(const QuerySpec& q, std::optional<int> boundary, std::optional<int> fallback_boundary) {
  auto s = single(q, boundary ? Mode::kCollaborative : Mode::kEdgeOnly);
  s.workload.total_rows = 80'000;  // 20 chunks of 4000 rows
  auto chunk = static_cast<std::int64_t>(s.workload.chunk_rows);
  if (boundary) s.forced_migration_at = *boundary * chunk;
  if (fallback_boundary) s.forced_fallback_at = *fallback_boundary * chunk;
  s.name = boundary ? fmt::format("forced/k={}{}/{}", *boundary,
                                  fallback_boundary ? fmt::format("/j={}", *fallback_boundary) : std::string{}, q.name)
                    : fmt::format("forced/edge-only/{}", q.name);
  return s;
}

ScenarioConfig cache_hit_case(int queries, int hits) {
  auto s = base_scenario();
  s.mode = Mode::kCollaborative;
  s.workload.devices = queries;
  s.workload.sensor_count = 1;  // only t1 is queried
  s.workload.planted_matches = 0;
  s.edge.io_throttle = 10;
  s.preload.clear();
  for (int d = 1; d <= queries; ++d) {
    s.queries.push_back({fmt::format("Q1@{}", device_alias(d)),
                         fmt::format("SELECT t1 FROM {} WHERE t1='v999'", device_alias(d)), 1});
    if (d <= hits) s.preload.push_back(device_alias(d) + ".t1");
  }
  s.name = fmt::format("cache-hit/hits={}of{}", hits, queries);
  return s;
}

std::vector<Preset> presets() {
  std::vector<Preset> out;
  const Mode modes[] = {Mode::kEdgeOnly, Mode::kCloudOnly, Mode::kCollaborative};

  Preset types{"query-types", "Q1-Q5 under edge-only, cloud-only and collaborative execution", {}};
  for (const auto& q : standard_queries())
    for (auto m : modes) {
      auto s = single(q, m);
      s.name = fmt::format("types/{}/{}", q.name, tag(m));
      types.scenarios.push_back(s);
    }
  out.push_back(types);

  Preset io{"io-sweep", "Q1-Q5 with the edge disk throttled 1x to 10x", {}};
  for (double f : {1.0, 2.0, 5.0, 10.0})
    for (const auto& q : standard_queries())
      for (auto m : {Mode::kEdgeOnly, Mode::kCollaborative}) io.scenarios.push_back(io_case(q, m, f));
  out.push_back(io);

  Preset cpu{"cpu-sweep", "Q1-Q5 at 1 to 6 concurrent copies on a loaded edge CPU", {}};
  for (int c = 1; c <= 6; ++c)
    for (const auto& q : standard_queries())
      for (auto m : {Mode::kEdgeOnly, Mode::kCollaborative}) cpu.scenarios.push_back(cpu_case(q, m, c));
  out.push_back(cpu);

  Preset bw{"bandwidth-sweep", "Q1-Q5 collaborative under I/O overload at 50 to 10000 Mbps", {}};
  for (double mbps : {50.0, 100.0, 500.0, 1000.0, 10000.0})
    for (const auto& q : standard_queries()) bw.scenarios.push_back(bandwidth_case(q, mbps));
  out.push_back(bw);

  Preset forced{"forced-migration", "Q1 forced to migrate at each of 20 chunk boundaries", {}};
  forced.scenarios.push_back(forced_case(standard_query("Q1"), std::nullopt));
  for (int k = 0; k < 20; ++k) forced.scenarios.push_back(forced_case(standard_query("Q1"), k));
  out.push_back(forced);

  Preset cache{"cache-hit", "6-way Q1 with 0 to 6 of the queried series resident in the cloud cache", {}};
  for (int h = 0; h <= 6; ++h) cache.scenarios.push_back(cache_hit_case(6, h));
  out.push_back(cache);
  return out;
}

Preset find_preset(const std::string& name) {
  for (auto& p : presets())
    if (p.name == name) return p;
  throw CedError(ErrorCode::kInvalidConfig, "unknown preset '" + name + "'");
}

}  // namespace ced::harness
