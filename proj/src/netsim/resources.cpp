#include "ced/netsim/resources.hpp"

#include <algorithm>
#include <cmath>

#include "ced/common/error.hpp"

namespace ced::netsim {

void BusyLog::add(SimTime start, SimTime end) {
  if (end <= start) return;
  spans_.emplace_back(start, end);
  while (spans_.size() > 8192) spans_.pop_front();
}

SimTime BusyLog::busy_in(SimTime now, SimTime window) const {
  auto lo = now - window;
  SimTime busy = 0;
  for (const auto& [s, e] : spans_) {
    if (e <= lo || s >= now) continue;
    busy += std::min(e, now) - std::max(s, lo);
  }
  return busy;
}

DiskModel::DiskModel(EventLoop& loop, double max_read_mb_s, double throttle)
    : loop_(loop), max_rate_(max_read_mb_s * 1e6), throttle_(1.0) {
  if (!(max_read_mb_s > 0)) throw CedError(ErrorCode::kInvalidConfig, "disk rate must be > 0");
  set_throttle(throttle);
}

void DiskModel::set_throttle(double factor) {
  if (!(factor >= 1.0)) throw CedError(ErrorCode::kInvalidConfig, "disk throttle must be >= 1");
  throttle_ = factor;
}

void DiskModel::read(std::uint64_t bytes, std::function<void()> done) {
  auto now = loop_.now();
  if (bytes == 0) {
    loop_.at(now, std::move(done));
    return;
  }
  double rate = max_rate_ / throttle_;
  auto service = static_cast<SimTime>(std::llround(static_cast<double>(bytes) / rate * kSecond));
  auto start = std::max(now, free_at_);
  free_at_ = start + service;
  busy_.add(start, free_at_);
  bytes_read_ += bytes;
  loop_.at(free_at_, std::move(done));
}

double DiskModel::io_usage(SimTime window) const {
  if (window <= 0) return 0.0;
  double busy = static_cast<double>(busy_.busy_in(loop_.now(), window)) / static_cast<double>(window);
  double u = (1.0 - 1.0 / throttle_) + busy / throttle_;
  return std::clamp(u, 0.0, 1.0);
}

CpuModel::CpuModel(EventLoop& loop, int cores, double background_load) : loop_(loop), background_(0.0) {
  if (cores < 1) throw CedError(ErrorCode::kInvalidConfig, "cores must be >= 1");
  free_at_.assign(static_cast<std::size_t>(cores), 0);
  set_background_load(background_load);
}

void CpuModel::set_background_load(double u) {
  if (!(u >= 0 && u < 1)) throw CedError(ErrorCode::kInvalidConfig, "cpu background load must be in [0, 1)");
  background_ = u;
}

void CpuModel::run(SimTime work, std::function<void()> done) {
  auto now = loop_.now();
  if (work <= 0) {
    loop_.at(now, std::move(done));
    return;
  }
  auto stretched = static_cast<SimTime>(std::llround(static_cast<double>(work) / (1.0 - background_)));
  auto core = std::min_element(free_at_.begin(), free_at_.end());
  auto start = std::max(now, *core);
  *core = start + stretched;
  busy_.add(start, *core);
  total_work_ += work;
  loop_.at(*core, std::move(done));
}

double CpuModel::cpu_usage(SimTime window) const {
  if (window <= 0) return background_;
  double busy = static_cast<double>(busy_.busy_in(loop_.now(), window)) /
                (static_cast<double>(window) * static_cast<double>(free_at_.size()));
  return std::clamp(background_ + (1.0 - background_) * busy, 0.0, 1.0);
}

}  // namespace ced::netsim
