#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ced/coherence/cloud_cache.hpp"
#include "ced/harness/workload.hpp"
#include "ced/migrate/cloud_node.hpp"
#include "ced/migrate/edge_node.hpp"
#include "ced/monitor/monitor.hpp"
#include "ced/netsim/link.hpp"

namespace ced::harness {

enum class Mode : std::uint8_t { kEdgeOnly, kCloudOnly, kCollaborative };

std::string_view mode_name(Mode m);
Mode parse_mode(const std::string& s);

struct QuerySpec {
  std::string name;
  std::string sql;
  int concurrency = 1;
};

struct ScenarioConfig {
  std::string name = "scenario";
  Mode mode = Mode::kCollaborative;
  WorkloadConfig workload;
  std::vector<QuerySpec> queries;
  netsim::LinkConfig link;
  migrate::EdgeConfig edge;
  migrate::CloudConfig cloud;
  monitor::ThresholdPolicy policy;
  double sample_period_ms = 100.0;
  coherence::CacheConfig cache;
  /// Device aliases or series paths synced to the cloud cache before start.
  std::vector<std::string> preload;
  std::optional<std::int64_t> forced_migration_at;  // stored rows
  std::optional<std::int64_t> forced_fallback_at;   // stored rows, cloud side
  std::optional<double> link_fail_at_ms;
  double time_limit_s = 3600.0;

  /// Checks ranges and that every query parses; the second form also plans
  /// each query against `catalog`.
  void validate() const;
  void validate(const queryplan::Catalog& catalog) const;
};

/// A scenario file holds one scenario map, or `scenarios:` (a list) with an
/// optional `defaults:` map merged under each entry.
std::vector<ScenarioConfig> parse_scenarios(const YAML::Node& root);
std::vector<ScenarioConfig> load_scenarios(const std::filesystem::path& file);
ScenarioConfig parse_scenario(const YAML::Node& node, ScenarioConfig base = {});

/// Applies --seed / --scale overrides.
void apply_overrides(ScenarioConfig& s, std::optional<std::uint64_t> seed, std::optional<double> scale);

}  // namespace ced::harness
