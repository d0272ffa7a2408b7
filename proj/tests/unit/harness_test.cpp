#include <gtest/gtest.h>
#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

#include "ced/common/error.hpp"
#include "ced/harness/presets.hpp"
#include "ced/harness/report.hpp"
#include "ced/harness/simulation.hpp"
#include "test_util.hpp"

using namespace ced;
using namespace ced::harness;

namespace {

migrate::QueryOutcome outcome(double start_s, double end_s) {
  migrate::QueryOutcome o;
  o.start = netsim::from_seconds(start_s);
  o.end = netsim::from_seconds(end_s);
  o.finished = true;
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Workload, PointCountsAndTimestamps) {
  test::TempDir d;
  WorkloadConfig w;  // nine sensors, 100k rows, 1 ms
  Dataset ds(w, d.path());
  EXPECT_EQ(ds.points(), 900'000u);
  ASSERT_EQ(ds.series().size(), 9u);
  for (const auto& p : ds.series()) {
    auto st = ds.store().stats(p);
    EXPECT_EQ(st.rows, 100'000u);
    EXPECT_EQ(st.min_ts, 0);
    EXPECT_EQ(st.max_ts, 99'999);
  }
  // v999 frequency on the text sensor: expected 100 of 100k, sd ~10.
  auto rows = ds.store().read_all(ds.series()[0]);
  int hits = 0;
  for (const auto& r : rows) hits += r.value == tsstore::Value(std::string("v999"));
  EXPECT_GT(hits, 60);
  EXPECT_LT(hits, 140);
  // planted Q2 literal
  int planted = 0;
  for (const auto& r : ds.store().read_all(ds.series()[2])) planted += r.value == tsstore::Value(497.44467);
  EXPECT_EQ(planted, w.planted_matches);
}

TEST(Workload, SameSeedSameBytes) {
  test::TempDir d;
  WorkloadConfig w;
  w.total_rows = 5000;
  Dataset a(w, d / "a"), b(w, d / "b");
  for (const auto& p : a.series()) EXPECT_EQ(a.store().image(p), b.store().image(p));
  w.seed = 8;
  Dataset c(w, d / "c");
  EXPECT_NE(a.store().image(a.series()[0]), c.store().image(c.series()[0]));
}

TEST(Workload, YamlAndValidation) {
  auto w = parse_workload(YAML::Load("{sensors: 4, rows: 1000, interval_ms: 10, types: [double], planted_sensor: t2}"));
  EXPECT_EQ(w.sensor_count, 4);
  EXPECT_EQ(w.total_rows, 1000);
  EXPECT_EQ(w.sampling_interval_ms, 10);
  EXPECT_EQ(w.sensor_type(3), tsstore::DataType::kDouble);
  WorkloadConfig bad;
  bad.planted_sensor = "t1";  // text sensor
  EXPECT_THROW(bad.validate(), CedError);
  EXPECT_EQ(device_alias(1), "dev");
  EXPECT_EQ(device_alias(3), "dev3");
}

TEST(Metrics, EquationArithmetic) {
  RunReport r;
  for (double end : {0.5, 1.0, 1.5, 2.0}) r.queries.push_back({"Q1", 0, outcome(0.0, end)});
  compute_metrics(r);
  EXPECT_DOUBLE_EQ(r.max_time_ms, 2000.0);
  EXPECT_DOUBLE_EQ(r.qps, 2.0);
  EXPECT_DOUBLE_EQ(r.mean_latency_ms, 1250.0);
  RunReport empty;
  compute_metrics(empty);
  EXPECT_EQ(empty.qps, 0.0);
}

TEST(Scenario, ParsesDefaultsAndList) {
  auto root = YAML::Load(R"(
defaults:
  mode: collaborative
  workload: {rows: 2000, interval_ms: 100}
  link: {bandwidth_mbps: 50, rtt_ms: 4}
  edge: {io_throttle: 5}
scenarios:
  - name: a
    queries: [{name: Q1, sql: "SELECT t1 FROM dev WHERE t1='v999'", concurrency: 2}]
  - name: b
    mode: edge-only
    link: {rtt_ms: 9}
    queries: [{name: Q3, sql: "SELECT t1, t3 FROM dev"}]
)");
  auto s = parse_scenarios(root);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].mode, Mode::kCollaborative);
  EXPECT_EQ(s[0].queries[0].concurrency, 2);
  EXPECT_EQ(s[0].workload.total_rows, 2000);
  EXPECT_DOUBLE_EQ(s[0].edge.io_throttle, 5.0);
  EXPECT_EQ(s[1].mode, Mode::kEdgeOnly);
  EXPECT_DOUBLE_EQ(s[1].link.rtt_ms, 9.0);
  EXPECT_DOUBLE_EQ(s[1].link.bandwidth_mbps, 50.0);
}

TEST(Scenario, ValidationAndOverrides) {
  auto s = forced_case(standard_query("Q1"), 2);
  EXPECT_NO_THROW(s.validate());
  auto bad = s;
  bad.queries.push_back({"X", "SELEKT", 1});
  EXPECT_THROW(bad.validate(), CedError);
  EXPECT_THROW(parse_mode("sideways"), CedError);
  apply_overrides(s, 99, 0.5);
  EXPECT_EQ(s.workload.seed, 99u);
  EXPECT_EQ(s.workload.total_rows, 40'000);
  EXPECT_EQ(s.forced_migration_at, 4000);
  EXPECT_THROW(apply_overrides(s, std::nullopt, 0.0), CedError);
}

TEST(Presets, AllNamedAndValid) {
  std::vector<std::string> names;
  for (const auto& p : presets()) {
    names.push_back(p.name);
    EXPECT_FALSE(p.scenarios.empty());
    for (const auto& s : p.scenarios) EXPECT_NO_THROW(s.validate()) << s.name;
  }
  EXPECT_EQ(names, (std::vector<std::string>{"query-types", "io-sweep", "cpu-sweep", "bandwidth-sweep",
                                             "forced-migration", "cache-hit"}));
  EXPECT_THROW(find_preset("nope"), CedError);
}

TEST(Simulation, ForcedQ1MatchesEdgeOnly) {
  test::TempDir d;
  auto base = forced_case(standard_query("Q1"), std::nullopt);
  base.workload.total_rows = 20'000;
  auto forced = forced_case(standard_query("Q1"), 2);
  forced.workload.total_rows = 20'000;
  DatasetPool pool(d.path());
  auto& ds = pool.get(base.workload);
  EXPECT_EQ(&ds, &pool.get(forced.workload));
  auto r0 = simulate(base, ds, d / "cloud");
  auto r1 = simulate(forced, ds, d / "cloud");
  EXPECT_EQ(r0.queries[0].outcome.checksum, r1.queries[0].outcome.checksum);
  EXPECT_GT(r0.queries[0].outcome.rows, 0u);
  EXPECT_EQ(r1.queries[0].outcome.migrations, 1u);
}

TEST(Simulation, Q4FullWindowCounts) {
  test::TempDir d;
  auto cfg = forced_case(standard_query("Q4"), std::nullopt);
  cfg.workload.total_rows = 9000;  // 100 ms sampling: 3000 rows per 5 min window
  Dataset ds(cfg.workload, d / "data");
  auto r = simulate(cfg, ds, d / "cloud");
  EXPECT_EQ(r.queries[0].outcome.rows, 3u);
  // Independent count over the raw rows.
  auto rows = ds.store().read_all(ds.series()[0]);
  std::map<std::int64_t, int> per_window;
  for (const auto& p : rows) ++per_window[p.timestamp / 300'000];
  for (const auto& [w, n] : per_window) EXPECT_EQ(n, 3000) << w;
}

TEST(Report, DeterministicCsv) {
  test::TempDir d;
  auto p = find_preset("cache-hit");
  std::vector<ScenarioConfig> two(p.scenarios.begin(), p.scenarios.begin() + 2);
  for (auto& s : two) s.workload.total_rows = 20'000;
  auto a = run_all(two, d / "wa");
  auto b = run_all(two, d / "wb");
  emit(a, d / "oa");
  emit(b, d / "ob");
  for (const char* f : {"metrics.csv", "summary.csv", "decisions.csv", "bytes.csv", "events.csv"}) {
    ASSERT_TRUE(std::filesystem::exists(d / "oa" / f)) << f;
    EXPECT_EQ(slurp(d / "oa" / f), slurp(d / "ob" / f)) << f;
  }
}
