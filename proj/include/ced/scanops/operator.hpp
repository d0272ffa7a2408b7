#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "ced/scanops/logical_index.hpp"
#include "ced/tsstore/tsblock.hpp"

namespace ced::scanops {

/// Work performed by operator steps; the hosting node turns these into simulated time.
struct ExecCounters {
  std::uint64_t disk_bytes = 0;
  std::uint64_t chunks_loaded = 0;
  std::uint64_t chunks_skipped = 0;
  std::uint64_t rows_decoded = 0;
  std::uint64_t rows_filtered_text = 0;
  std::uint64_t rows_filtered_numeric = 0;
  std::uint64_t rows_aggregated = 0;
  std::uint64_t rows_merged = 0;
  std::uint64_t rows_projected = 0;
  std::uint64_t rows_received = 0;

  ExecCounters& operator+=(const ExecCounters& o);
  bool operator==(const ExecCounters&) const = default;
};

struct NextResult {
  enum class Status : std::uint8_t {
    kBlock,    // block carries rows
    kYield,    // progress made, nothing to emit yet
    kPending,  // waiting on a remote source
    kDone,
  };

  Status status = Status::kDone;
  tsstore::TsBlock block;

  static NextResult of(tsstore::TsBlock b) { return {Status::kBlock, std::move(b)}; }
  static NextResult yield() { return {Status::kYield, {}}; }
  static NextResult pending() { return {Status::kPending, {}}; }
  static NextResult done() { return {Status::kDone, {}}; }
};

/// Volcano operator. next() does a bounded amount of work (at most one chunk
/// load) and never blocks; has_next() is side-effect free.
class Operator {
 public:
  virtual ~Operator() = default;
  virtual NextResult next(ExecCounters& c) = 0;
  virtual bool has_next() const = 0;
};

using OperatorPtr = std::unique_ptr<Operator>;

/// Stream that replaces local reading after a scan migrates.
class RemoteBlockSource {
 public:
  struct Pull {
    enum class Kind : std::uint8_t { kBlock, kPending, kFinished, kResumeLocal };
    Kind kind = Kind::kPending;
    tsstore::TsBlock block;
    LogicalIndex index;  // kResumeLocal: where local reading restarts
  };

  virtual ~RemoteBlockSource() = default;
  virtual Pull pull() = 0;
  virtual bool finished() const = 0;
};

}  // namespace ced::scanops
