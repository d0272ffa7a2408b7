#pragma once

#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <optional>

#include "ced/scanops/operator.hpp"
#include "ced/tsstore/series_store.hpp"

namespace ced::scanops {

/// Scan whose data source can switch between local storage and a remote stream.
/// A handed-out block counts as consumed once the parent calls next() again
/// (or mark_consumed()); the logical index only moves on consumption.
class CollaborativeScan : public Operator {
 public:
  /// Called at the first boundary after request_pause(). Returning a source
  /// switches the scan to remote mode; returning null keeps reading locally.
  using PauseHook = std::function<std::shared_ptr<RemoteBlockSource>(const LogicalIndex&)>;

  NextResult next(ExecCounters& c) final;
  bool has_next() const final;

  void request_pause(PauseHook hook) { hook_ = std::move(hook); }
  void cancel_pause() { hook_ = nullptr; }
  bool pause_requested() const { return static_cast<bool>(hook_); }

  void mark_consumed() { commit(); }
  bool remote() const { return remote_ != nullptr; }
  bool finished() const { return done_; }

  /// Committed progress; safe to read at any time.
  virtual LogicalIndex logical_index() const = 0;
  virtual LogicalIndex::Kind index_kind() const = 0;
  /// True while loaded blocks have not all been consumed by the parent.
  virtual bool in_flight() const = 0;
  /// Stored rows this scan has moved past (read or skipped), in chunk steps.
  virtual std::int64_t progress_rows() const = 0;

  /// Consume-before-package: throws CedError(kGuardViolation) while in_flight().
  LogicalIndex export_index() const;

  std::optional<tsstore::Timestamp> last_delivered() const { return last_delivered_; }
  const std::string& series() const { return series_; }
  /// Series label carried by the blocks this scan emits.
  virtual const std::string& output_name() const { return series_; }

 protected:
  explicit CollaborativeScan(std::string series) : series_(std::move(series)) {}

  virtual void commit() = 0;
  virtual NextResult local_step(ExecCounters& c) = 0;
  virtual bool local_has_next() const = 0;
  /// Restarts local reading at `idx`.
  virtual void reposition(const LogicalIndex& idx) = 0;

  // Rows at or before this timestamp were already delivered by a remote source.
  std::optional<tsstore::Timestamp> watermark_;

 private:
  NextResult deliver(tsstore::TsBlock b);

  std::string series_;
  PauseHook hook_;
  std::shared_ptr<RemoteBlockSource> remote_;
  std::optional<tsstore::Timestamp> last_delivered_;
  bool done_ = false;
};

/// Half-open row-position range used when the offset is pushed down as a predicate.
struct PositionPredicate {
  std::int64_t lo = 0;
  std::int64_t hi = std::numeric_limits<std::int64_t>::max();
  bool is_satisfied(std::int64_t chunk_start, std::int64_t chunk_end) const { return chunk_end > lo && chunk_start < hi; }
};

/// Positions `it` at the first chunk not fully covered by `cur_offset` and returns
/// the residual offset (0 unless the data ran out first, in which case the
/// iterator is exhausted). With `query_filter` the offset is turned into a
/// PositionPredicate checked against chunk metadata. An offset that lands
/// inside a chunk throws CedError(kIntraChunkOffset).
std::int64_t skip_to_offset(std::int64_t cur_offset, tsstore::ChunkIterator& it, bool query_filter = false,
                            ExecCounters* counters = nullptr);

class SeriesScan final : public CollaborativeScan {
 public:
  SeriesScan(const tsstore::SeriesStore& store, const tsstore::SeriesPath& series, bool query_filter = false,
             std::optional<LogicalIndex> resume = std::nullopt);

  LogicalIndex logical_index() const override { return LogicalIndex::row_offset(offset_); }
  LogicalIndex::Kind index_kind() const override { return LogicalIndex::Kind::kRowOffset; }
  bool in_flight() const override { return !pending_.empty() || uncommitted_ > 0; }
  std::int64_t progress_rows() const override { return offset_; }

  std::uint64_t total_rows() const { return total_rows_; }

 protected:
  void commit() override;
  NextResult local_step(ExecCounters& c) override;
  bool local_has_next() const override { return !pending_.empty() || it_.valid(); }
  void reposition(const LogicalIndex& idx) override;

 private:
  const tsstore::SeriesStore& store_;
  tsstore::SeriesPath path_;
  bool query_filter_;
  tsstore::ChunkIterator it_;
  std::deque<tsstore::TsBlock> pending_;
  std::int64_t offset_ = 0;
  std::int64_t chunk_rows_ = 0;
  std::int64_t uncommitted_ = 0;
  std::uint64_t total_rows_ = 0;
};

}  // namespace ced::scanops
