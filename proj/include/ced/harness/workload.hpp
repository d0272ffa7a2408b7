#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "ced/queryplan/plan.hpp"
#include "ced/tsstore/series_store.hpp"

namespace YAML {
class Node;
}

namespace ced::harness {

struct WorkloadConfig {
  int sensor_count = 9;
  /// Per-sensor type names (text, boolean, double, int64); cycles when shorter
  /// than sensor_count. Empty means text, boolean, double, int64 repeating.
  std::vector<std::string> type_mix;
  std::int64_t sampling_interval_ms = 1;
  std::int64_t total_rows = 100'000;  // per sensor
  std::uint64_t seed = 7;
  int devices = 1;
  std::string storage_group = "root.ln.edge1";
  /// Exact copies of planted_value written into planted_sensor.
  int planted_matches = 10;
  std::string planted_sensor = "t3";
  double planted_value = 497.44467;
  std::size_t chunk_rows = 4000;
  std::size_t page_rows = 1000;

  void validate() const;
  tsstore::DataType sensor_type(int index) const;
  /// Stable text form; equal keys generate identical datasets.
  std::string key() const;
};

WorkloadConfig parse_workload(const YAML::Node& node, WorkloadConfig base = {});
WorkloadConfig load_workload(const std::filesystem::path& file);

std::string device_path(const WorkloadConfig& cfg, int device);  // device is 1-based
std::string device_alias(int device);                             // "dev" for 1, "devN" otherwise

/// Generated edge data set: a populated store plus its catalog.
class Dataset {
 public:
  Dataset(const WorkloadConfig& config, std::filesystem::path dir);

  const WorkloadConfig& config() const { return config_; }
  tsstore::SeriesStore& store() { return *store_; }
  const tsstore::SeriesStore& store() const { return *store_; }
  const queryplan::Catalog& catalog() const { return catalog_; }
  const std::vector<tsstore::SeriesPath>& series() const { return series_; }
  std::uint64_t points() const { return points_; }

 private:
  WorkloadConfig config_;
  std::unique_ptr<tsstore::SeriesStore> store_;
  queryplan::Catalog catalog_;
  std::vector<tsstore::SeriesPath> series_;
  std::uint64_t points_ = 0;
};

}  // namespace ced::harness
