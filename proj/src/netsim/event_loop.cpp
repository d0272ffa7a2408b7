#include "ced/netsim/event_loop.hpp"

#include "ced/common/error.hpp"

namespace ced::netsim {

void EventLoop::at(SimTime t, Action a) {
  if (t < now_) throw CedError(ErrorCode::kProtocolViolation, "event scheduled in the past");
  queue_.push({t, seq_++, std::move(a)});
}

bool EventLoop::step() {
  if (queue_.empty()) return false;
  // priority_queue::top is const; move the action out before popping.
  auto ev = std::move(const_cast<Event&>(queue_.top()));
  queue_.pop();
  now_ = ev.time;
  ++dispatched_;
  ev.action();
  return true;
}

std::size_t EventLoop::run_until(SimTime until) {
  std::size_t n = 0;
  while (!queue_.empty() && queue_.top().time <= until) {
    step();
    ++n;
  }
  if (until > now_) now_ = until;
  return n;
}

std::size_t EventLoop::run() {
  std::size_t n = 0;
  while (step()) ++n;
  return n;
}

}  // namespace ced::netsim
