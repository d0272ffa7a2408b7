#pragma once

#include <filesystem>
#include <map>
#include <memory>

#include "ced/harness/scenario.hpp"

namespace ced::harness {

struct QueryRow {
  std::string name;
  int instance = 0;
  migrate::QueryOutcome outcome;
};

struct ByteRow {
  std::string channel;
  netsim::Direction dir = netsim::Direction::kEdgeToCloud;
  netsim::ByteCounts counts;
};

struct RunReport {
  std::string scenario;
  Mode mode = Mode::kEdgeOnly;
  std::vector<QueryRow> queries;
  std::vector<monitor::DecisionRecord> decisions;
  std::vector<ByteRow> bytes;
  std::vector<migrate::ProtocolEvent> events;
  migrate::CloudStats cloud;
  std::map<migrate::ChannelId, migrate::ChannelId> channel_map;

  // Eq. 2 / Eq. 3 over `queries`.
  double mean_latency_ms = 0;
  double max_time_ms = 0;
  double qps = 0;

  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t cross_deliveries = 0;
  std::uint64_t data_before_ack = 0;
  std::uint64_t protocol_errors = 0;
  netsim::SimTime end_time = 0;

  double cache_hit_rate() const;
  std::uint64_t bytes_sent(netsim::Direction dir) const;
  const QueryRow& query(const std::string& name, int instance = 0) const;
};

/// Recomputes Eq. 2 / Eq. 3 from the per-query table.
void compute_metrics(RunReport& r);

/// Runs one scenario against an already generated dataset. `scratch` holds
/// the cloud cache files. Throws CedError(kProtocolViolation) when queries
/// are still running at the scenario's time limit.
RunReport simulate(const ScenarioConfig& cfg, Dataset& data, const std::filesystem::path& scratch);

/// Generates each distinct workload once under `scratch`.
class DatasetPool {
 public:
  explicit DatasetPool(std::filesystem::path scratch) : scratch_(std::move(scratch)) {}
  Dataset& get(const WorkloadConfig& w);

 private:
  std::filesystem::path scratch_;
  std::map<std::string, std::unique_ptr<Dataset>> sets_;
};

std::vector<RunReport> run_all(const std::vector<ScenarioConfig>& scenarios, const std::filesystem::path& scratch);

}  // namespace ced::harness
