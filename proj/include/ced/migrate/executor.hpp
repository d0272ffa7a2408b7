#pragma once

#include <functional>
#include <memory>

#include "ced/netsim/resources.hpp"
#include "ced/scanops/operator.hpp"

namespace ced::migrate {

/// Per-row CPU costs in nanoseconds on the reference (edge) core.
struct CostModel {
  double decode_ns = 500;
  double filter_text_ns = 1500;
  double filter_numeric_ns = 300;
  double aggregate_ns = 200;
  double merge_ns = 300;
  double project_ns = 20;
  double serialize_ns = 100;
  double deserialize_ns = 100;
  double step_overhead_ns = 1000;
  double cpu_speedup = 1.0;

  netsim::SimTime cpu_time(const scanops::ExecCounters& c, std::uint64_t rows_serialized = 0) const;
};

/// Drives one operator tree on a node: each next() call is charged its disk
/// bytes, then its CPU time, and only then is the result handled.
class Task {
 public:
  enum class Verdict { kContinue, kPark };
  using BlockSink = std::function<Verdict(tsstore::TsBlock&&)>;

  Task(netsim::EventLoop& loop, netsim::DiskModel& disk, netsim::CpuModel& cpu, const CostModel& cost,
       scanops::Operator& op, BlockSink on_block, std::function<void()> on_done);

  /// Runs after every step, before the result is handled.
  void set_after_step(std::function<void()> f) { after_step_ = std::move(f); }
  /// Adds serialization cost for emitted rows (blocks that go on the wire).
  void set_serialize_output(bool on) { serialize_output_ = on; }

  void start();
  /// Resumes a parked task; remembered if the task is mid-step.
  void wake();
  void cancel() { cancelled_ = true; }

  bool parked() const { return parked_; }
  bool done() const { return done_; }
  const scanops::ExecCounters& totals() const { return totals_; }

 private:
  void step();
  void handle(scanops::NextResult r);

  netsim::EventLoop& loop_;
  netsim::DiskModel& disk_;
  netsim::CpuModel& cpu_;
  const CostModel& cost_;
  scanops::Operator& op_;
  BlockSink on_block_;
  std::function<void()> on_done_;
  std::function<void()> after_step_;
  bool serialize_output_ = false;
  bool started_ = false;
  bool parked_ = false;
  bool wake_pending_ = false;
  bool done_ = false;
  bool cancelled_ = false;
  scanops::ExecCounters totals_;
};

}  // namespace ced::migrate
