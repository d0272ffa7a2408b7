#pragma once

#include <deque>
#include <optional>
#include <utility>

#include "ced/queryplan/query.hpp"
#include "ced/scanops/series_scan.hpp"

namespace ced::scanops {

/// Windows [lo + k*width, lo + (k+1)*width) clipped to hi.
struct WindowSpec {
  tsstore::Timestamp lo = 0;
  tsstore::Timestamp hi = 0;
  std::int64_t width = 1;

  std::int64_t count() const { return hi <= lo ? 0 : (hi - lo + width - 1) / width; }
  tsstore::Timestamp end_of(tsstore::Timestamp start) const { return start + width < hi ? start + width : hi; }
  bool is_boundary(tsstore::Timestamp ts) const { return ts == hi || (ts >= lo && ts < hi && (ts - lo) % width == 0); }
};

/// Windowed count / max_value. One output row per window, empty windows
/// included (count 0, max_value null). Chunks ending before the current window
/// are skipped from metadata; with skipping enabled, count also takes a chunk
/// that lies wholly inside one window from its row count without loading it.
class AggScan final : public CollaborativeScan {
 public:
  AggScan(const tsstore::SeriesStore& store, const tsstore::SeriesPath& series, queryplan::AggFn fn, WindowSpec spec,
          std::optional<LogicalIndex> resume = std::nullopt, bool metadata_skipping = true);

  LogicalIndex logical_index() const override { return LogicalIndex::window_start(committed_); }
  LogicalIndex::Kind index_kind() const override { return LogicalIndex::Kind::kWindowStart; }
  bool in_flight() const override { return !out_.empty() || uncommitted_.has_value(); }
  std::int64_t progress_rows() const override;
  const std::string& output_name() const override { return out_name_; }

  const WindowSpec& spec() const { return spec_; }

 protected:
  void commit() override;
  NextResult local_step(ExecCounters& c) override;
  bool local_has_next() const override { return !out_.empty() || cursor_ < spec_.hi; }
  void reposition(const LogicalIndex& idx) override;

 private:
  void fold(const std::vector<tsstore::DataPoint>& rows, ExecCounters& c);
  void close_window();
  void close_until(tsstore::Timestamp bound);
  NextResult emit();

  const tsstore::SeriesStore& store_;
  tsstore::SeriesPath path_;
  queryplan::AggFn fn_;
  WindowSpec spec_;
  bool skipping_;
  std::string out_name_;

  tsstore::ChunkIterator it_;
  tsstore::Timestamp cursor_ = 0;  // window being accumulated
  tsstore::Timestamp committed_ = 0;
  std::optional<tsstore::Timestamp> uncommitted_;
  std::int64_t count_ = 0;
  tsstore::Value max_;
  std::deque<std::pair<tsstore::Timestamp, tsstore::Value>> out_;
};

}  // namespace ced::scanops
