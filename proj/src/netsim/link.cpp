#include "ced/netsim/link.hpp"

#include <algorithm>
#include <cmath>

#include "ced/common/error.hpp"

namespace ced::netsim {

std::string_view direction_name(Direction d) { return d == Direction::kEdgeToCloud ? "edge->cloud" : "cloud->edge"; }

void LinkConfig::validate() const {
  if (!(bandwidth_mbps > 0) || !std::isfinite(bandwidth_mbps)) {
    throw CedError(ErrorCode::kInvalidConfig, "bandwidth_mbps must be > 0");
  }
  if (!(rtt_ms >= 0) || !std::isfinite(rtt_ms)) throw CedError(ErrorCode::kInvalidConfig, "rtt_ms must be >= 0");
  if (!(loss_rate >= 0 && loss_rate < 1)) throw CedError(ErrorCode::kInvalidConfig, "loss_rate must be in [0, 1)");
}

Link::Link(EventLoop& loop, LinkConfig config) : loop_(loop), config_(config), rng_(config.seed) {
  config_.validate();
  rtt_ = from_ms(config_.rtt_ms);
}

SimTime Link::backlog(Direction dir) const {
  return std::max<SimTime>(0, free_at_[static_cast<int>(dir)] - loop_.now());
}

SimTime Link::transmit_time(std::size_t bytes) const {
  return static_cast<SimTime>(std::llround(static_cast<double>(bytes) * 8.0 * 1000.0 / config_.bandwidth_mbps));
}

void Link::set_background_load(Direction dir, double fraction) {
  if (!(fraction >= 0 && fraction < 1)) throw CedError(ErrorCode::kInvalidConfig, "background load must be in [0, 1)");
  background_[static_cast<int>(dir)] = fraction;
}

SimTime Link::send(Envelope env) {
  if (!open_) throw CedError(ErrorCode::kLinkClosed, "send on closed link (" + env.channel + ")");
  int d = static_cast<int>(env.dir);
  auto now = loop_.now();
  auto start = std::max(now, free_at_[d]);
  auto tx = transmit_time(env.payload.size());
  if (background_[d] > 0) tx = static_cast<SimTime>(std::llround(static_cast<double>(tx) / (1.0 - background_[d])));
  free_at_[d] = start + tx;
  if (tx > 0) busy_[d].push_back({start, start + tx});
  while (busy_[d].size() > 4096) busy_[d].pop_front();

  env.enqueue_time = now;
  env.deliver_time = start + tx + rtt_ / 2;
  bool dropped = env.best_effort && config_.loss_rate > 0 && rng_.chance(config_.loss_rate);

  auto& c = counts_[{env.channel, env.dir}];
  ++c.messages;
  c.sent += env.payload.size();
  trace_.push_back({env.enqueue_time, env.deliver_time, env.channel, env.dir, env.payload.size(), dropped});

  auto when = env.deliver_time;
  auto idx = trace_.size() - 1;
  loop_.at(when, [this, idx, env = std::move(env), dropped]() mutable { deliver(idx, std::move(env), dropped); });
  return when;
}

void Link::deliver(std::size_t trace_index, Envelope env, bool dropped) {
  auto& c = counts_[{env.channel, env.dir}];
  if (dropped || !open_) {
    c.dropped += env.payload.size();
    trace_[trace_index].dropped = true;
    return;
  }
  c.delivered += env.payload.size();
  auto& h = receivers_[static_cast<int>(env.dir)];
  if (h) h(std::move(env));
}

void Link::close() {
  if (!open_) return;
  open_ = false;
  for (auto& cb : close_listeners_) cb();
}

double Link::utilization(Direction dir, SimTime window) const {
  int d = static_cast<int>(dir);
  auto now = loop_.now();
  if (window <= 0) return background_[d];
  auto lo = now - window;
  SimTime busy = 0;
  for (auto it = busy_[d].rbegin(); it != busy_[d].rend(); ++it) {
    if (it->end <= lo) break;
    busy += std::max<SimTime>(0, std::min(it->end, now) - std::max(it->start, lo));
  }
  double u = background_[d] + (1.0 - background_[d]) * static_cast<double>(busy) / static_cast<double>(window);
  return std::clamp(u, 0.0, 1.0);
}

ByteCounts Link::totals() const {
  ByteCounts t;
  for (const auto& [k, c] : counts_) {
    t.messages += c.messages;
    t.sent += c.sent;
    t.delivered += c.delivered;
    t.dropped += c.dropped;
  }
  return t;
}

}  // namespace ced::netsim
