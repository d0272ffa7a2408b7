#pragma once

#include <string>
#include <vector>

#include "ced/harness/scenario.hpp"

namespace ced::harness {

/// The five benchmark queries, Q1..Q5, against alias `dev`.
const std::vector<QuerySpec>& standard_queries();
QuerySpec standard_query(const std::string& name);

/// Desk-scale defaults shared by every preset.
ScenarioConfig base_scenario();

struct Preset {
  std::string name;
  std::string description;
  std::vector<ScenarioConfig> scenarios;
};

std::vector<Preset> presets();
/// Throws CedError(kInvalidConfig) for an unknown name.
Preset find_preset(const std::string& name);

// Single-scenario builders used by the presets (and reusable on their own).
ScenarioConfig io_case(const QuerySpec& q, Mode mode, double throttle);
ScenarioConfig cpu_case(const QuerySpec& q, Mode mode, int concurrency);
ScenarioConfig bandwidth_case(const QuerySpec& q, double mbps);
ScenarioConfig forced_case(const QuerySpec& q, std::optional<int> boundary, std::optional<int> fallback_boundary = {});
ScenarioConfig cache_hit_case(int queries, int hits);

}  // namespace ced::harness
