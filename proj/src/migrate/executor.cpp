#include "ced/migrate/executor.hpp"

#include <cmath>

namespace ced::migrate {

netsim::SimTime CostModel::cpu_time(const scanops::ExecCounters& c, std::uint64_t rows_serialized) const {
  double ns = step_overhead_ns + decode_ns * static_cast<double>(c.rows_decoded) +
              filter_text_ns * static_cast<double>(c.rows_filtered_text) +
              filter_numeric_ns * static_cast<double>(c.rows_filtered_numeric) +
              aggregate_ns * static_cast<double>(c.rows_aggregated) + merge_ns * static_cast<double>(c.rows_merged) +
              project_ns * static_cast<double>(c.rows_projected) +
              deserialize_ns * static_cast<double>(c.rows_received) +
              serialize_ns * static_cast<double>(rows_serialized);
  return static_cast<netsim::SimTime>(std::llround(ns / cpu_speedup));
}

Task::Task(netsim::EventLoop& loop, netsim::DiskModel& disk, netsim::CpuModel& cpu, const CostModel& cost,
           scanops::Operator& op, BlockSink on_block, std::function<void()> on_done)
    : loop_(loop),
      disk_(disk),
      cpu_(cpu),
      cost_(cost),
      op_(op),
      on_block_(std::move(on_block)),
      on_done_(std::move(on_done)) {}

void Task::start() {
  if (started_) return;
  started_ = true;
  loop_.after(0, [this] { step(); });
}

void Task::wake() {
  if (done_ || cancelled_ || !started_) return;
  if (parked_) {
    parked_ = false;
    loop_.after(0, [this] { step(); });
  } else {
    wake_pending_ = true;
  }
}

void Task::step() {
  if (done_ || cancelled_) return;
  wake_pending_ = false;
  scanops::ExecCounters c;
  auto r = op_.next(c);
  totals_ += c;
  std::uint64_t wire_rows = serialize_output_ && r.status == scanops::NextResult::Status::kBlock ? r.block.row_count() : 0;
  auto cpu_ns = cost_.cpu_time(c, wire_rows);
  auto result = std::make_shared<scanops::NextResult>(std::move(r));
  disk_.read(c.disk_bytes, [this, cpu_ns, result] {
    cpu_.run(cpu_ns, [this, result] {
      if (after_step_) after_step_();
      handle(std::move(*result));
    });
  });
}

void Task::handle(scanops::NextResult r) {
  if (cancelled_) return;
  using S = scanops::NextResult::Status;
  switch (r.status) {
    case S::kDone:
      done_ = true;
      on_done_();
      return;
    case S::kPending:
      if (wake_pending_) {
        wake_pending_ = false;
        loop_.after(0, [this] { step(); });
      } else {
        parked_ = true;
      }
      return;
    case S::kYield:
      loop_.after(0, [this] { step(); });
      return;
    case S::kBlock:
      if (on_block_(std::move(r.block)) == Verdict::kPark) {
        if (wake_pending_) {
          wake_pending_ = false;
          loop_.after(0, [this] { step(); });
        } else {
          parked_ = true;
        }
        return;
      }
      loop_.after(0, [this] { step(); });
      return;
  }
}

}  // namespace ced::migrate
