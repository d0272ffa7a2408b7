#include "ced/scanops/agg_scan.hpp"

#include "ced/common/error.hpp"

namespace ced::scanops {

using queryplan::AggFn;
using tsstore::Timestamp;

AggScan::AggScan(const tsstore::SeriesStore& store, const tsstore::SeriesPath& series, AggFn fn, WindowSpec spec,
                 std::optional<LogicalIndex> resume, bool metadata_skipping)
    : CollaborativeScan(series.str()),
      store_(store),
      path_(series),
      fn_(fn),
      spec_(spec),
      skipping_(metadata_skipping),
      out_name_(std::string(queryplan::agg_name(fn)) + "(" + series.str() + ")") {
  if (spec_.width <= 0) throw CedError(ErrorCode::kInvalidConfig, "window width must be positive");
  if (spec_.hi < spec_.lo) spec_.hi = spec_.lo;
  reposition(resume.value_or(LogicalIndex::window_start(spec_.lo)));
}

void AggScan::reposition(const LogicalIndex& idx) {
  if (idx.kind != LogicalIndex::Kind::kWindowStart) {
    throw CedError(ErrorCode::kIndexKindMismatch, "aggregation scan given " + to_string(idx));
  }
  if (!spec_.is_boundary(idx.value) && !(spec_.count() == 0 && idx.value == spec_.lo)) {
    throw CedError(ErrorCode::kProtocolViolation, to_string(idx) + " is not a window boundary");
  }
  // Unfiltered: chunks before the first window are dropped by the metadata check in local_step.
  it_ = store_.contains(path_) && spec_.hi > spec_.lo ? store_.open_chunk_iterator(path_) : tsstore::ChunkIterator();
  cursor_ = committed_ = idx.value;
  uncommitted_.reset();
  count_ = 0;
  max_ = {};
  out_.clear();
}

std::int64_t AggScan::progress_rows() const {
  std::int64_t rows = 0;
  const auto& chunks = it_.chunks();
  for (std::size_t i = 0; i < it_.position() && i < chunks.size(); ++i) rows += chunks[i].row_count;
  return rows;
}

void AggScan::commit() {
  if (uncommitted_) committed_ = *uncommitted_;
  uncommitted_.reset();
}

void AggScan::close_window() {
  tsstore::Value v = fn_ == AggFn::kCount ? tsstore::Value(count_) : max_;
  out_.emplace_back(cursor_, std::move(v));
  count_ = 0;
  max_ = {};
  cursor_ = spec_.end_of(cursor_);
}

void AggScan::close_until(Timestamp bound) {
  while (cursor_ < spec_.hi && spec_.end_of(cursor_) <= bound && out_.size() < tsstore::kBlockCapacity) {
    close_window();
  }
}

void AggScan::fold(const std::vector<tsstore::DataPoint>& rows, ExecCounters& c) {
  for (const auto& p : rows) {
    if (p.timestamp < cursor_) continue;
    while (cursor_ < spec_.hi && p.timestamp >= spec_.end_of(cursor_)) close_window();
    if (cursor_ >= spec_.hi) break;
    ++c.rows_aggregated;
    if (fn_ == AggFn::kCount) {
      ++count_;
    } else if (!tsstore::is_null(p.value)) {
      auto cmp = tsstore::compare_values(p.value, max_);
      if (tsstore::is_null(max_) || (cmp && *cmp > 0)) max_ = p.value;
    }
  }
}

NextResult AggScan::emit() {
  auto b = tsstore::TsBlock::single(out_name_);
  while (!out_.empty() && b.row_count() < tsstore::kBlockCapacity) {
    b.push_row(out_.front().first, std::move(out_.front().second));
    out_.pop_front();
  }
  uncommitted_ = out_.empty() ? cursor_ : out_.front().first;
  return NextResult::of(std::move(b));
}

NextResult AggScan::local_step(ExecCounters& c) {
  if (out_.size() >= tsstore::kBlockCapacity) return emit();
  if (cursor_ >= spec_.hi) return out_.empty() ? NextResult::done() : emit();

  // Skip chunks that end before the current window.
  while (it_.valid() && it_.current().max_ts < cursor_) {
    it_.skip_current();
    ++c.chunks_skipped;
  }
  if (it_.valid()) {
    const auto& meta = it_.current();
    if (meta.min_ts >= spec_.end_of(cursor_)) {
      close_until(meta.min_ts);
    } else if (skipping_ && fn_ == AggFn::kCount && meta.min_ts >= cursor_ && meta.max_ts < spec_.end_of(cursor_)) {
      count_ += meta.row_count;
      it_.skip_current();
      ++c.chunks_skipped;
    } else {
      std::vector<tsstore::DataPoint> rows;
      rows.reserve(meta.row_count);
      for (const auto& b : store_.load_chunk_pages(meta)) {
        for (std::size_t i = 0; i < b.row_count(); ++i) rows.push_back({b.timestamps[i], b.values()[i]});
      }
      c.disk_bytes += meta.byte_size;
      c.rows_decoded += meta.row_count;
      ++c.chunks_loaded;
      it_.skip_current();
      fold(rows, c);
      // Windows ending before the next chunk can no longer change.
      close_until(it_.valid() ? it_.current().min_ts : spec_.hi);
    }
  } else {
    close_until(spec_.hi);
  }
  if (!out_.empty()) return emit();
  return NextResult::yield();
}

}  // namespace ced::scanops
