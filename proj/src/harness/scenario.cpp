#include "ced/harness/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>

#include "ced/common/error.hpp"

namespace ced::harness {

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::kEdgeOnly: return "edge-only";
    case Mode::kCloudOnly: return "cloud-only";
    case Mode::kCollaborative: return "collaborative";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  if (s == "edge-only" || s == "edge") return Mode::kEdgeOnly;
  if (s == "cloud-only" || s == "cloud") return Mode::kCloudOnly;
  if (s == "collaborative" || s == "ced") return Mode::kCollaborative;
  throw CedError(ErrorCode::kInvalidConfig, "unknown mode '" + s + "'");
}

void ScenarioConfig::validate() const {
  workload.validate();
  link.validate();
  policy.validate();
  cache.validate();
  edge.protocol.validate();
  if (queries.empty()) throw CedError(ErrorCode::kInvalidConfig, name + ": no queries");
  for (const auto& q : queries) {
    if (q.concurrency < 1) throw CedError(ErrorCode::kInvalidConfig, q.name + ": concurrency must be >= 1");
    queryplan::parse(q.sql);
  }
  if (sample_period_ms <= 0) throw CedError(ErrorCode::kInvalidConfig, "sample_period_ms must be > 0");
  if (edge.io_throttle < 1) throw CedError(ErrorCode::kInvalidConfig, "io_throttle must be >= 1");
  if (edge.cpu_load < 0 || edge.cpu_load >= 1) throw CedError(ErrorCode::kInvalidConfig, "cpu_load must be in [0,1)");
  if (edge.cores < 1 || cloud.cores < 1) throw CedError(ErrorCode::kInvalidConfig, "cores must be >= 1");
  if (mode != Mode::kCollaborative && (forced_migration_at || forced_fallback_at)) {
    throw CedError(ErrorCode::kInvalidConfig, name + ": forced migration needs collaborative mode");
  }
  if (forced_fallback_at && !forced_migration_at) {
    throw CedError(ErrorCode::kInvalidConfig, name + ": forced_fallback_at needs forced_migration_at");
  }
  if (forced_fallback_at && *forced_fallback_at <= *forced_migration_at) {
    throw CedError(ErrorCode::kInvalidConfig, name + ": forced_fallback_at must be after forced_migration_at");
  }
}

void ScenarioConfig::validate(const queryplan::Catalog& catalog) const {
  validate();
  for (const auto& q : queries) queryplan::plan(queryplan::parse(q.sql), catalog);
}

namespace {

void merge_into(YAML::Node base, const YAML::Node& over) {
  for (auto it = over.begin(); it != over.end(); ++it) {
    auto key = it->first.as<std::string>();
    if (it->second.IsMap() && base[key] && base[key].IsMap()) {
      merge_into(base[key], it->second);
    } else {
      base[key] = YAML::Clone(it->second);
    }
  }
}

template <typename T>
void get(const YAML::Node& n, const char* key, T& out) {
  if (n && n[key]) out = n[key].template as<T>();
}

}  // namespace

ScenarioConfig parse_scenario(const YAML::Node& n, ScenarioConfig s) {
  try {
    get(n, "name", s.name);
    if (n["mode"]) s.mode = parse_mode(n["mode"].as<std::string>());
    s.workload = parse_workload(n["workload"], s.workload);
    if (n["queries"]) {
      s.queries.clear();
      for (const auto& q : n["queries"]) {
        QuerySpec spec;
        get(q, "name", spec.name);
        get(q, "sql", spec.sql);
        get(q, "concurrency", spec.concurrency);
        if (spec.name.empty()) spec.name = "q" + std::to_string(s.queries.size() + 1);
        s.queries.push_back(spec);
      }
    }
    if (auto l = n["link"]) {
      get(l, "bandwidth_mbps", s.link.bandwidth_mbps);
      get(l, "rtt_ms", s.link.rtt_ms);
      get(l, "loss_rate", s.link.loss_rate);
      get(l, "seed", s.link.seed);
      if (l["fail_at_ms"]) s.link_fail_at_ms = l["fail_at_ms"].as<double>();
    }
    if (auto e = n["edge"]) {
      get(e, "disk_mb_s", s.edge.disk_mb_s);
      get(e, "io_throttle", s.edge.io_throttle);
      get(e, "cores", s.edge.cores);
      get(e, "cpu_load", s.edge.cpu_load);
    }
    if (auto c = n["cloud"]) {
      get(c, "cache_read_mb_s", s.cloud.cache_read_mb_s);
      get(c, "cores", s.cloud.cores);
      get(c, "cpu_speedup", s.cloud.cost.cpu_speedup);
      get(c, "planning_ms", s.cloud.planning_ms);
    }
    if (auto c = n["cost_ns"]) {
      for (auto* cost : {&s.edge.cost, &s.cloud.cost}) {
        get(c, "decode", cost->decode_ns);
        get(c, "filter_text", cost->filter_text_ns);
        get(c, "filter_numeric", cost->filter_numeric_ns);
        get(c, "aggregate", cost->aggregate_ns);
        get(c, "merge", cost->merge_ns);
        get(c, "project", cost->project_ns);
        get(c, "serialize", cost->serialize_ns);
        get(c, "deserialize", cost->deserialize_ns);
        get(c, "step_overhead", cost->step_overhead_ns);
      }
    }
    if (auto p = n["policy"]) {
      get(p, "io_high", s.policy.io_high);
      get(p, "cpu_high", s.policy.cpu_high);
      get(p, "low_watermark", s.policy.low_watermark);
      get(p, "dwell", s.policy.dwell);
      get(p, "period_ms", s.sample_period_ms);
    }
    if (auto c = n["cache"]) {
      get(c, "tau_hot", s.cache.tau_hot);
      get(c, "capacity", s.cache.capacity);
      get(c, "sync_threshold", s.cache.sync_threshold);
      if (c["preload"]) s.preload = c["preload"].as<std::vector<std::string>>();
    }
    if (auto p = n["protocol"]) {
      get(p, "probe_retries", s.edge.protocol.probe_retries);
      get(p, "probe_timeout_factor", s.edge.protocol.probe_timeout_factor);
      get(p, "credit_depth", s.edge.protocol.credit_depth);
      if (p["transmission"]) {
        auto t = p["transmission"].as<std::string>();
        if (t == "auto") {
          s.edge.transmission.reset();
        } else if (t == "pushdown") {
          s.edge.transmission = migrate::TransmissionMode::kPredicatePushdown;
        } else if (t == "streaming") {
          s.edge.transmission = migrate::TransmissionMode::kBlockStreaming;
        } else {
          throw CedError(ErrorCode::kInvalidConfig, "transmission must be auto, pushdown or streaming");
        }
      }
    }
    if (n["forced_migration_at"]) s.forced_migration_at = n["forced_migration_at"].as<std::int64_t>();
    if (n["forced_fallback_at"]) s.forced_fallback_at = n["forced_fallback_at"].as<std::int64_t>();
    get(n, "time_limit_s", s.time_limit_s);
  } catch (const YAML::Exception& e) {
    throw CedError(ErrorCode::kInvalidConfig, s.name + ": " + e.what());
  }
  s.validate();
  return s;
}

std::vector<ScenarioConfig> parse_scenarios(const YAML::Node& root) {
  if (!root || !root.IsMap()) throw CedError(ErrorCode::kInvalidConfig, "scenario file must be a map");
  std::vector<ScenarioConfig> out;
  if (!root["scenarios"]) {
    out.push_back(parse_scenario(root));
    return out;
  }
  for (const auto& entry : root["scenarios"]) {
    YAML::Node merged = root["defaults"] ? YAML::Clone(root["defaults"]) : YAML::Node(YAML::NodeType::Map);
    merge_into(merged, entry);
    out.push_back(parse_scenario(merged));
  }
  return out;
}

std::vector<ScenarioConfig> load_scenarios(const std::filesystem::path& file) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(file.string());
  } catch (const YAML::Exception& e) {
    throw CedError(ErrorCode::kInvalidConfig, file.string() + ": " + e.what());
  }
  return parse_scenarios(root);
}

void apply_overrides(ScenarioConfig& s, std::optional<std::uint64_t> seed, std::optional<double> scale) {
  if (seed) {
    s.workload.seed = *seed;
    s.link.seed = *seed;
  }
  if (scale) {
    if (*scale <= 0) throw CedError(ErrorCode::kInvalidConfig, "scale must be > 0");
    s.workload.total_rows = std::llround(static_cast<double>(s.workload.total_rows) * *scale);
    if (s.forced_migration_at) s.forced_migration_at = std::llround(static_cast<double>(*s.forced_migration_at) * *scale);
    if (s.forced_fallback_at) s.forced_fallback_at = std::llround(static_cast<double>(*s.forced_fallback_at) * *scale);
  }
}

}  // namespace ced::harness
