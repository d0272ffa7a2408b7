#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

namespace ced::netsim {

/// Simulated nanoseconds.
using SimTime = std::int64_t;

inline constexpr SimTime kMicrosecond = 1'000;
inline constexpr SimTime kMillisecond = 1'000'000;
inline constexpr SimTime kSecond = 1'000'000'000;

inline double to_ms(SimTime t) { return static_cast<double>(t) / kMillisecond; }
inline SimTime from_ms(double ms) { return static_cast<SimTime>(ms * kMillisecond + 0.5); }
inline SimTime from_seconds(double s) { return static_cast<SimTime>(s * kSecond + 0.5); }

/// Single source of simulated time. Events fire in (time, insertion order).
class EventLoop {
 public:
  using Action = std::function<void()>;

  SimTime now() const { return now_; }

  void at(SimTime t, Action a);
  void after(SimTime delay, Action a) { at(now_ + delay, std::move(a)); }

  /// Runs the earliest event; false when the queue is empty.
  bool step();
  /// Runs every event with time <= until, then moves the clock to `until`.
  std::size_t run_until(SimTime until);
  std::size_t run();

  bool empty() const { return queue_.empty(); }
  std::size_t pending() const { return queue_.size(); }
  std::uint64_t dispatched() const { return dispatched_; }

 private:
  struct Event {
    SimTime time;
    std::uint64_t seq;
    Action action;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  SimTime now_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t dispatched_ = 0;
};

}  // namespace ced::netsim
