#include "ced/scanops/series_scan.hpp"

#include <algorithm>

#include "ced/common/error.hpp"

namespace ced::scanops {

using tsstore::TsBlock;

std::string to_string(const LogicalIndex& idx) {
  return (idx.kind == LogicalIndex::Kind::kRowOffset ? "RowOffset(" : "WindowStart(") + std::to_string(idx.value) +
         ")";
}

void encode_index(ByteWriter& w, const LogicalIndex& idx) {
  w.u8(static_cast<std::uint8_t>(idx.kind));
  w.i64(idx.value);
}

LogicalIndex decode_index(ByteReader& r) {
  auto kind = r.u8();
  if (kind > 1) throw CedError(ErrorCode::kDecodeError, "bad logical index kind " + std::to_string(kind));
  return {static_cast<LogicalIndex::Kind>(kind), r.i64()};
}

ExecCounters& ExecCounters::operator+=(const ExecCounters& o) {
  disk_bytes += o.disk_bytes;
  chunks_loaded += o.chunks_loaded;
  chunks_skipped += o.chunks_skipped;
  rows_decoded += o.rows_decoded;
  rows_filtered_text += o.rows_filtered_text;
  rows_filtered_numeric += o.rows_filtered_numeric;
  rows_aggregated += o.rows_aggregated;
  rows_merged += o.rows_merged;
  rows_projected += o.rows_projected;
  rows_received += o.rows_received;
  return *this;
}

// ---- CollaborativeScan ----

LogicalIndex CollaborativeScan::export_index() const {
  if (in_flight()) throw CedError(ErrorCode::kGuardViolation, series_ + ": blocks still in flight");
  return logical_index();
}

bool CollaborativeScan::has_next() const {
  if (done_) return false;
  return remote_ ? !remote_->finished() : local_has_next();
}

NextResult CollaborativeScan::deliver(TsBlock b) {
  if (watermark_) {
    auto first = std::upper_bound(b.timestamps.begin(), b.timestamps.end(), *watermark_) - b.timestamps.begin();
    if (first > 0) {
      b.timestamps.erase(b.timestamps.begin(), b.timestamps.begin() + first);
      for (auto& col : b.columns) col.erase(col.begin(), col.begin() + first);
    }
    if (b.empty()) return NextResult::yield();
    watermark_.reset();
  }
  last_delivered_ = b.timestamps.back();
  return NextResult::of(std::move(b));
}

NextResult CollaborativeScan::next(ExecCounters& c) {
  if (done_) return NextResult::done();
  commit();
  if (hook_ && !remote_ && !in_flight()) {
    auto hook = std::move(hook_);
    hook_ = nullptr;
    remote_ = hook(export_index());
  }
  if (remote_) {
    auto p = remote_->pull();
    switch (p.kind) {
      case RemoteBlockSource::Pull::Kind::kBlock:
        c.rows_received += p.block.row_count();
        return deliver(std::move(p.block));
      case RemoteBlockSource::Pull::Kind::kPending:
        return NextResult::pending();
      case RemoteBlockSource::Pull::Kind::kFinished:
        remote_.reset();
        done_ = true;
        return NextResult::done();
      case RemoteBlockSource::Pull::Kind::kResumeLocal:
        remote_.reset();
        reposition(p.index);
        watermark_ = last_delivered_;
        return NextResult::yield();
    }
  }
  auto r = local_step(c);
  if (r.status == NextResult::Status::kDone) {
    done_ = true;
    return r;
  }
  if (r.status != NextResult::Status::kBlock) return r;
  return deliver(std::move(r.block));
}

// ---- Algorithm 1 ----

std::int64_t skip_to_offset(std::int64_t cur_offset, tsstore::ChunkIterator& it, bool query_filter,
                            ExecCounters* counters) {
  if (cur_offset < 0) throw CedError(ErrorCode::kIntraChunkOffset, "negative offset");
  auto skip = [&] {
    it.skip_current();
    if (counters) ++counters->chunks_skipped;
  };
  if (query_filter) {
    // Offset expressed as a position predicate evaluated on chunk metadata.
    PositionPredicate pred{cur_offset};
    std::int64_t start = 0;
    while (it.valid()) {
      std::int64_t end = start + it.current().row_count;
      if (pred.is_satisfied(start, end)) {
        if (start != cur_offset) {
          throw CedError(ErrorCode::kIntraChunkOffset,
                         "offset " + std::to_string(cur_offset) + " inside chunk [" + std::to_string(start) + ", " +
                             std::to_string(end) + ")");
        }
        return 0;
      }
      skip();
      start = end;
    }
    return cur_offset - start;
  }
  while (it.valid()) {
    std::int64_t rows = it.current().row_count;
    if (cur_offset < rows) break;
    skip();
    cur_offset -= rows;
  }
  if (cur_offset > 0 && it.valid()) {
    throw CedError(ErrorCode::kIntraChunkOffset, std::to_string(cur_offset) + " rows into chunk of " +
                                                     std::to_string(it.current().row_count));
  }
  return cur_offset;
}

// ---- SeriesScan ----

SeriesScan::SeriesScan(const tsstore::SeriesStore& store, const tsstore::SeriesPath& series, bool query_filter,
                       std::optional<LogicalIndex> resume)
    : CollaborativeScan(series.str()), store_(store), path_(series), query_filter_(query_filter) {
  reposition(resume.value_or(LogicalIndex::row_offset(0)));
}

void SeriesScan::reposition(const LogicalIndex& idx) {
  if (idx.kind != LogicalIndex::Kind::kRowOffset) {
    throw CedError(ErrorCode::kIndexKindMismatch, "series scan given " + to_string(idx));
  }
  it_ = store_.contains(path_) ? store_.open_chunk_iterator(path_) : tsstore::ChunkIterator();
  total_rows_ = it_.total_rows();
  skip_to_offset(idx.value, it_, query_filter_);
  offset_ = idx.value;
  pending_.clear();
  chunk_rows_ = 0;
  uncommitted_ = 0;
}

void SeriesScan::commit() {
  offset_ += uncommitted_;
  uncommitted_ = 0;
}

NextResult SeriesScan::local_step(ExecCounters& c) {
  if (pending_.empty()) {
    if (!it_.valid()) return NextResult::done();
    const auto& meta = it_.current();
    if (watermark_ && meta.max_ts <= *watermark_) {
      // Already delivered remotely; skip from metadata.
      offset_ += meta.row_count;
      it_.skip_current();
      ++c.chunks_skipped;
      return NextResult::yield();
    }
    for (auto& b : store_.load_chunk_pages(meta)) pending_.push_back(std::move(b));
    c.disk_bytes += meta.byte_size;
    c.rows_decoded += meta.row_count;
    ++c.chunks_loaded;
    chunk_rows_ = meta.row_count;
    it_.skip_current();
  }
  auto b = std::move(pending_.front());
  pending_.pop_front();
  if (pending_.empty()) uncommitted_ = chunk_rows_;
  return NextResult::of(std::move(b));
}

}  // namespace ced::scanops
