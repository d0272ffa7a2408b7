#include "ced/coherence/change_log.hpp"

#include <algorithm>

#include "ced/common/error.hpp"

namespace ced::coherence {

std::string_view change_op_name(ChangeOp op) {
  switch (op) {
    case ChangeOp::kInsert: return "insert";
    case ChangeOp::kDelete: return "delete";
    case ChangeOp::kUpdate: return "update";
    case ChangeOp::kFlush: return "flush";
  }
  return "?";
}

namespace {

void encode_record(ByteWriter& w, const ChangeRecord& r) {
  w.u64(r.seq);
  w.str16(r.series.str());
  w.u8(static_cast<std::uint8_t>(r.op));
  w.u64(r.batch_id);
  w.u32(r.chunk_rows);
  w.u32(r.page_rows);
  w.u32(static_cast<std::uint32_t>(r.rows.size()));
  for (const auto& p : r.rows) {
    w.i64(p.timestamp);
    tsstore::encode_value(w, p.value);
  }
}

ChangeRecord decode_record(ByteReader& r) {
  ChangeRecord c;
  c.seq = r.u64();
  c.series = tsstore::SeriesPath::parse(r.str16());
  auto op = r.u8();
  if (op < 1 || op > 4) throw CedError(ErrorCode::kDecodeError, "bad change op " + std::to_string(op));
  c.op = static_cast<ChangeOp>(op);
  c.batch_id = r.u64();
  c.chunk_rows = r.u32();
  c.page_rows = r.u32();
  auto n = r.u32();
  c.rows.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    tsstore::DataPoint p;
    p.timestamp = r.i64();
    p.value = tsstore::decode_value(r);
    c.rows.push_back(std::move(p));
  }
  return c;
}

}  // namespace

Bytes encode_batch(const ChangeBatch& b) {
  ByteWriter w;
  w.u64(b.first_seq);
  w.u64(b.last_seq);
  w.u32(static_cast<std::uint32_t>(b.records.size()));
  for (const auto& rec : b.records) {
    ByteWriter body;
    encode_record(body, rec);
    w.bytes32(body.bytes());
  }
  return std::move(w).take();
}

ChangeBatch decode_batch(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  ChangeBatch b;
  b.first_seq = r.u64();
  b.last_seq = r.u64();
  auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    auto len = r.u32();
    ByteReader body(r.raw(len));
    b.records.push_back(decode_record(body));
    if (!body.done()) throw CedError(ErrorCode::kDecodeError, "trailing bytes in change record");
  }
  if (!r.done()) throw CedError(ErrorCode::kDecodeError, "trailing bytes in change batch");
  return b;
}

void MessageQueue::push(Bytes message, netsim::SimTime now) {
  items_.push_back({now + delay_, std::move(message)});
  ++pushed_;
}

std::vector<Bytes> MessageQueue::poll(netsim::SimTime now) {
  std::vector<Bytes> out;
  while (!items_.empty() && items_.front().visible_at <= now) {
    out.push_back(std::move(items_.front().bytes));
    items_.pop_front();
  }
  return out;
}

Publisher::Publisher(MessageQueue& queue, std::size_t batch_size) : queue_(queue), batch_size_(batch_size) {
  if (batch_size_ == 0) throw CedError(ErrorCode::kInvalidConfig, "batch_size must be > 0");
}

std::uint64_t Publisher::published_seq(const tsstore::SeriesPath& series) const {
  auto it = published_.find(series);
  return it == published_.end() ? 0 : it->second;
}

void Publisher::capture_and_publish(const std::vector<ChangeRecord>& changes, netsim::SimTime now) {
  std::map<tsstore::SeriesPath, std::vector<const ChangeRecord*>> by_series;
  for (const auto& c : changes) by_series[c.series].push_back(&c);
  for (const auto& [series, recs] : by_series) {
    auto expect = published_seq(series) + 1;
    for (const auto* r : recs) {
      if (r->seq != expect) {
        throw CedError(ErrorCode::kSequenceGap, series.str() + ": expected seq " + std::to_string(expect) +
                                                    ", got " + std::to_string(r->seq));
      }
      ++expect;
    }
  }
  // Publish in first-appearance order of the series for a stable queue order.
  std::vector<tsstore::SeriesPath> order;
  for (const auto& c : changes) {
    if (std::find(order.begin(), order.end(), c.series) == order.end()) order.push_back(c.series);
  }
  for (const auto& series : order) {
    const auto& recs = by_series[series];
    for (std::size_t i = 0; i < recs.size(); i += batch_size_) {
      ChangeBatch b;
      auto id = next_batch_id_++;
      for (std::size_t j = i; j < std::min(recs.size(), i + batch_size_); ++j) {
        b.records.push_back(*recs[j]);
        b.records.back().batch_id = id;
      }
      b.first_seq = b.records.front().seq;
      b.last_seq = b.records.back().seq;
      queue_.push(encode_batch(b), now);
      published_[series] = b.last_seq;
    }
  }
}

ChangeRecord& ChangeCapture::record(const tsstore::SeriesPath& series, ChangeOp op) {
  auto& r = pending_.emplace_back();
  r.seq = ++seq_[series];
  r.series = series;
  r.op = op;
  return r;
}

void ChangeCapture::insert(const tsstore::SeriesPath& series, tsstore::DataPoint p) {
  store_.append(series, p);
  record(series, ChangeOp::kInsert).rows.push_back(std::move(p));
}

bool ChangeCapture::update(const tsstore::SeriesPath& series, tsstore::Timestamp ts, tsstore::Value v) {
  if (!store_.update(series, ts, v)) return false;
  record(series, ChangeOp::kUpdate).rows.push_back({ts, std::move(v)});
  return true;
}

bool ChangeCapture::erase(const tsstore::SeriesPath& series, tsstore::Timestamp ts) {
  if (!store_.erase(series, ts)) return false;
  record(series, ChangeOp::kDelete).rows.push_back({ts, {}});
  return true;
}

void ChangeCapture::flush(const tsstore::SeriesPath& series) {
  if (!store_.contains(series) || store_.memtable_rows(series) == 0) return;
  store_.flush(series);
  auto& r = record(series, ChangeOp::kFlush);
  r.chunk_rows = static_cast<std::uint32_t>(store_.options().chunk_target_rows);
  r.page_rows = static_cast<std::uint32_t>(store_.options().page_rows);
}

void ChangeCapture::publish(netsim::SimTime now) {
  if (pending_.empty()) return;
  publisher_.capture_and_publish(pending_, now);
  pending_.clear();
}

std::uint64_t ChangeCapture::captured_seq(const tsstore::SeriesPath& series) const {
  auto it = seq_.find(series);
  return it == seq_.end() ? 0 : it->second;
}

void apply_change(tsstore::SeriesStore& store, const ChangeRecord& r) {
  switch (r.op) {
    case ChangeOp::kInsert:
      for (const auto& p : r.rows) store.append(r.series, p);
      break;
    case ChangeOp::kUpdate:
      for (const auto& p : r.rows) store.update(r.series, p.timestamp, p.value);
      break;
    case ChangeOp::kDelete:
      for (const auto& p : r.rows) store.erase(r.series, p.timestamp);
      break;
    case ChangeOp::kFlush:
      store.flush(r.series, r.chunk_rows, r.page_rows);
      break;
  }
}

}  // namespace ced::coherence
