#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ced/common/bytes.hpp"
#include "ced/common/rng.hpp"
#include "ced/netsim/event_loop.hpp"

namespace ced::netsim {

enum class Direction : std::uint8_t { kEdgeToCloud = 0, kCloudToEdge = 1 };

std::string_view direction_name(Direction d);

struct LinkConfig {
  double bandwidth_mbps = 1000.0;
  double rtt_ms = 1.0;
  double loss_rate = 0.0;
  std::uint64_t seed = 1;

  /// Throws CedError(kInvalidConfig).
  void validate() const;
};

struct Envelope {
  std::string channel;  // channel label or control-plane tag
  Direction dir = Direction::kEdgeToCloud;
  Bytes payload;
  bool best_effort = false;  // subject to loss injection
  SimTime enqueue_time = 0;
  SimTime deliver_time = 0;
};

struct ByteCounts {
  std::uint64_t messages = 0;
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
};

struct TraceEntry {
  SimTime enqueue_time;
  SimTime deliver_time;
  std::string channel;
  Direction dir;
  std::size_t bytes;
  bool dropped;

  bool operator==(const TraceEntry&) const = default;
};

/// Full-duplex point-to-point link. Each direction serializes envelopes in
/// send order at the configured bandwidth, then adds rtt/2 of propagation:
///   deliver = max(now, direction_free) + bytes*8/bandwidth + rtt/2
/// so delivery is FIFO per direction (and therefore per channel).
class Link {
 public:
  using Handler = std::function<void(Envelope&&)>;

  Link(EventLoop& loop, LinkConfig config);

  void set_receiver(Direction dir, Handler h) { receivers_[static_cast<int>(dir)] = std::move(h); }
  void on_close(std::function<void()> cb) { close_listeners_.push_back(std::move(cb)); }

  /// Returns the scheduled delivery time. Throws CedError(kLinkClosed).
  SimTime send(Envelope env);

  /// Drops everything in flight and refuses further sends.
  void close();
  bool is_open() const { return open_; }

  /// Fraction of a direction's capacity in use over the trailing window,
  /// including injected background traffic.
  double utilization(Direction dir, SimTime window) const;
  void set_background_load(Direction dir, double fraction);

  SimTime rtt() const { return rtt_; }
  /// Serialization time still queued ahead of a new send in `dir`.
  SimTime backlog(Direction dir) const;
  SimTime transmit_time(std::size_t bytes) const;
  const LinkConfig& config() const { return config_; }

  const std::map<std::pair<std::string, Direction>, ByteCounts>& byte_report() const { return counts_; }
  ByteCounts totals() const;
  const std::vector<TraceEntry>& trace() const { return trace_; }

 private:
  struct Busy {
    SimTime start;
    SimTime end;
  };

  void deliver(std::size_t trace_index, Envelope env, bool dropped);

  EventLoop& loop_;
  LinkConfig config_;
  SimTime rtt_;
  Rng rng_;
  bool open_ = true;
  Handler receivers_[2];
  SimTime free_at_[2] = {0, 0};
  double background_[2] = {0.0, 0.0};
  std::deque<Busy> busy_[2];
  std::vector<std::function<void()>> close_listeners_;
  std::map<std::pair<std::string, Direction>, ByteCounts> counts_;
  std::vector<TraceEntry> trace_;
};

}  // namespace ced::netsim
