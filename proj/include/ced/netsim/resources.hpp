#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "ced/netsim/event_loop.hpp"

namespace ced::netsim {

/// Busy intervals kept for windowed utilization.
class BusyLog {
 public:
  void add(SimTime start, SimTime end);
  /// Busy time overlapping [now - window, now).
  SimTime busy_in(SimTime now, SimTime window) const;

 private:
  std::deque<std::pair<SimTime, SimTime>> spans_;
};

/// FIFO disk. A throttle factor f leaves 1/f of the nominal rate to the
/// simulated queries; the rest is taken by background readers, which count
/// toward I/O utilization:  io = (1 - 1/f) + busy_fraction / f.
class DiskModel {
 public:
  DiskModel(EventLoop& loop, double max_read_mb_s, double throttle = 1.0);

  /// Schedules `done` when `bytes` have been read. Zero bytes completes now.
  void read(std::uint64_t bytes, std::function<void()> done);

  void set_throttle(double factor);
  double throttle() const { return throttle_; }
  double max_rate_bytes_per_s() const { return max_rate_; }
  std::uint64_t bytes_read() const { return bytes_read_; }

  /// Eq. 1 over the trailing window: read rate / max read rate.
  double io_usage(SimTime window) const;

 private:
  EventLoop& loop_;
  double max_rate_;
  double throttle_;
  SimTime free_at_ = 0;
  std::uint64_t bytes_read_ = 0;
  BusyLog busy_;
};

/// `cores` FIFO servers. A synthetic background load u stretches every job by
/// 1/(1-u); cpu_usage = u + (1-u) * busy_fraction.
class CpuModel {
 public:
  CpuModel(EventLoop& loop, int cores, double background_load = 0.0);

  void run(SimTime work, std::function<void()> done);

  void set_background_load(double u);
  double background_load() const { return background_; }
  int cores() const { return static_cast<int>(free_at_.size()); }
  SimTime total_work() const { return total_work_; }

  double cpu_usage(SimTime window) const;

 private:
  EventLoop& loop_;
  double background_;
  std::vector<SimTime> free_at_;
  SimTime total_work_ = 0;
  BusyLog busy_;
};

}  // namespace ced::netsim
