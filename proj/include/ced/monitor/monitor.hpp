#pragma once

#include <cstdint>
#include <ostream>
#include <string_view>
#include <vector>

#include "ced/netsim/event_loop.hpp"

namespace ced::monitor {

struct ResourceSnapshot {
  double io_usage = 0.0;
  double cpu_usage = 0.0;
  netsim::SimTime time = 0;
};

/// Eq. 1: bytes read in the window over what the disk could have read. Clamped to [0, 1].
double io_utilization(std::uint64_t bytes_read, netsim::SimTime window, double max_read_bytes_per_s);
ResourceSnapshot make_snapshot(double io, double cpu, netsim::SimTime time);

struct ThresholdPolicy {
  double io_high = 0.80;
  double cpu_high = 0.85;
  double low_watermark = 0.50;
  int dwell = 3;

  /// Throws CedError(kInvalidConfig).
  void validate() const;
};

enum class Placement : std::uint8_t { kEdge, kCloud };
enum class Decision : std::uint8_t { kStay, kMigrateToCloud, kFallBackToEdge };

std::string_view decision_name(Decision d);
std::string_view placement_name(Placement p);

/// Pure rule over the trailing `dwell` snapshots.
Decision decide(const std::vector<ResourceSnapshot>& history, const ThresholdPolicy& policy, Placement placement);

struct DecisionRecord {
  netsim::SimTime time;
  double io_usage;
  double cpu_usage;
  Placement placement;
  Decision decision;
  bool acted;
};

/// Periodic decision loop. After a non-Stay decision the history restarts and
/// the next `dwell` samples are treated as settling time, so two opposite
/// decisions are always at least 2*dwell samples apart.
class Monitor {
 public:
  explicit Monitor(ThresholdPolicy policy);

  /// Records the sample and returns the decision for the current placement.
  /// `acted` is stored in the log (false when the caller ignores decisions).
  Decision observe(const ResourceSnapshot& s, Placement placement, bool acted = true);

  const std::vector<DecisionRecord>& log() const { return log_; }
  const ThresholdPolicy& policy() const { return policy_; }

 private:
  ThresholdPolicy policy_;
  std::vector<ResourceSnapshot> history_;
  int settling_ = 0;
  std::vector<DecisionRecord> log_;
};

/// CSV with header time_ms,io_usage,cpu_usage,placement,decision,acted.
void write_decision_csv(std::ostream& out, const std::vector<DecisionRecord>& log);

}  // namespace ced::monitor
