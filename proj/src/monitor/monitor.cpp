#include "ced/monitor/monitor.hpp"

#include <algorithm>
#include <cstdio>

#include "ced/common/error.hpp"

namespace ced::monitor {

double io_utilization(std::uint64_t bytes_read, netsim::SimTime window, double max_read_bytes_per_s) {
  if (window <= 0 || max_read_bytes_per_s <= 0) return 0.0;
  double seconds = static_cast<double>(window) / netsim::kSecond;
  return std::clamp(static_cast<double>(bytes_read) / (max_read_bytes_per_s * seconds), 0.0, 1.0);
}

ResourceSnapshot make_snapshot(double io, double cpu, netsim::SimTime time) {
  return {std::clamp(io, 0.0, 1.0), std::clamp(cpu, 0.0, 1.0), time};
}

void ThresholdPolicy::validate() const {
  auto ratio = [](double v) { return v >= 0 && v <= 1; };
  if (!ratio(io_high) || !ratio(cpu_high) || !ratio(low_watermark)) {
    throw CedError(ErrorCode::kInvalidConfig, "thresholds must be ratios in [0, 1]");
  }
  if (!(low_watermark < std::min(io_high, cpu_high))) {
    throw CedError(ErrorCode::kInvalidConfig, "low_watermark must be below both high thresholds");
  }
  if (dwell < 1) throw CedError(ErrorCode::kInvalidConfig, "dwell must be >= 1");
}

std::string_view decision_name(Decision d) {
  switch (d) {
    case Decision::kStay: return "stay";
    case Decision::kMigrateToCloud: return "migrate";
    case Decision::kFallBackToEdge: return "fallback";
  }
  return "?";
}

std::string_view placement_name(Placement p) { return p == Placement::kEdge ? "edge" : "cloud"; }

Decision decide(const std::vector<ResourceSnapshot>& history, const ThresholdPolicy& policy, Placement placement) {
  auto dwell = static_cast<std::size_t>(policy.dwell);
  if (history.size() < dwell) return Decision::kStay;
  auto first = history.end() - static_cast<std::ptrdiff_t>(dwell);
  if (placement == Placement::kEdge) {
    bool overloaded = std::all_of(first, history.end(), [&](const ResourceSnapshot& s) {
      return s.io_usage > policy.io_high || s.cpu_usage > policy.cpu_high;
    });
    return overloaded ? Decision::kMigrateToCloud : Decision::kStay;
  }
  bool recovered = std::all_of(first, history.end(), [&](const ResourceSnapshot& s) {
    return s.io_usage < policy.low_watermark && s.cpu_usage < policy.low_watermark;
  });
  return recovered ? Decision::kFallBackToEdge : Decision::kStay;
}

Monitor::Monitor(ThresholdPolicy policy) : policy_(policy) { policy_.validate(); }

Decision Monitor::observe(const ResourceSnapshot& s, Placement placement, bool acted) {
  Decision d = Decision::kStay;
  if (settling_ > 0) {
    --settling_;
  } else {
    history_.push_back(s);
    if (history_.size() > static_cast<std::size_t>(policy_.dwell)) history_.erase(history_.begin());
    d = decide(history_, policy_, placement);
    if (d != Decision::kStay) {
      history_.clear();
      settling_ = policy_.dwell;
    }
  }
  log_.push_back({s.time, s.io_usage, s.cpu_usage, placement, d, acted && d != Decision::kStay});
  return d;
}

void write_decision_csv(std::ostream& out, const std::vector<DecisionRecord>& log) {
  out << "time_ms,io_usage,cpu_usage,placement,decision,acted\n";
  char buf[160];
  for (const auto& r : log) {
    std::snprintf(buf, sizeof buf, "%.3f,%.4f,%.4f,%s,%s,%d\n", netsim::to_ms(r.time), r.io_usage, r.cpu_usage,
                  std::string(placement_name(r.placement)).c_str(), std::string(decision_name(r.decision)).c_str(),
                  r.acted ? 1 : 0);
    out << buf;
  }
}

}  // namespace ced::monitor
