#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <vector>

#include "ced/netsim/event_loop.hpp"
#include "ced/tsstore/series_store.hpp"

namespace ced::coherence {

enum class ChangeOp : std::uint8_t { kInsert = 1, kDelete = 2, kUpdate = 3, kFlush = 4 };

std::string_view change_op_name(ChangeOp op);

/// One captured mutation. Insert/update rows carry values; delete rows carry
/// only the timestamp. Flush carries the chunk and page sizes it used so the
/// replica lays out identical files.
struct ChangeRecord {
  std::uint64_t seq = 0;
  tsstore::SeriesPath series;
  ChangeOp op = ChangeOp::kInsert;
  std::vector<tsstore::DataPoint> rows;
  std::uint32_t chunk_rows = 0;
  std::uint32_t page_rows = 0;
  std::uint64_t batch_id = 0;

  bool operator==(const ChangeRecord&) const = default;
};

/// Contiguous seq range of one series.
struct ChangeBatch {
  std::uint64_t first_seq = 0;
  std::uint64_t last_seq = 0;
  std::vector<ChangeRecord> records;

  bool empty() const { return records.empty(); }
  bool operator==(const ChangeBatch&) const = default;
};

// Wire form (little-endian):
//   first_seq:u64 | last_seq:u64 | count:u32 | (len:u32 | record)*
//   record = seq:u64 | path_len:u16 | path | op:u8 | batch_id:u64 |
//            chunk_rows:u32 | page_rows:u32 | nrows:u32 | (ts:i64 | tag:u8 | payload)*
Bytes encode_batch(const ChangeBatch& b);
ChangeBatch decode_batch(std::span<const std::uint8_t> bytes);

/// In-simulator queue; a message becomes visible `delay` after it is pushed.
class MessageQueue {
 public:
  explicit MessageQueue(netsim::SimTime delay = 0) : delay_(delay) {}

  void push(Bytes message, netsim::SimTime now);
  /// Removes and returns every visible message in push order.
  std::vector<Bytes> poll(netsim::SimTime now);
  std::size_t size() const { return items_.size(); }
  std::uint64_t pushed() const { return pushed_; }

 private:
  struct Item {
    netsim::SimTime visible_at;
    Bytes bytes;
  };
  netsim::SimTime delay_;
  std::deque<Item> items_;
  std::uint64_t pushed_ = 0;
};

/// Splits records into per-series batches of at most batch_size and enqueues
/// them. Sequence numbers must continue each series' published sequence.
class Publisher {
 public:
  Publisher(MessageQueue& queue, std::size_t batch_size);

  /// Throws CedError(kSequenceGap) when a series' records do not start at
  /// published_seq + 1 or skip a number. Nothing is enqueued on error.
  void capture_and_publish(const std::vector<ChangeRecord>& changes, netsim::SimTime now);

  std::uint64_t published_seq(const tsstore::SeriesPath& series) const;
  std::size_t batch_size() const { return batch_size_; }

 private:
  MessageQueue& queue_;
  std::size_t batch_size_;
  std::uint64_t next_batch_id_ = 1;
  std::map<tsstore::SeriesPath, std::uint64_t> published_;
};

/// Applies mutations to the edge store and records them with per-series
/// sequence numbers. Only mutations that changed the store are recorded.
class ChangeCapture {
 public:
  ChangeCapture(tsstore::SeriesStore& store, Publisher& publisher) : store_(store), publisher_(publisher) {}

  void insert(const tsstore::SeriesPath& series, tsstore::DataPoint p);
  bool update(const tsstore::SeriesPath& series, tsstore::Timestamp ts, tsstore::Value v);
  bool erase(const tsstore::SeriesPath& series, tsstore::Timestamp ts);
  void flush(const tsstore::SeriesPath& series);

  /// Hands everything captured so far to the publisher.
  void publish(netsim::SimTime now);

  std::uint64_t captured_seq(const tsstore::SeriesPath& series) const;
  std::size_t unpublished() const { return pending_.size(); }

 private:
  ChangeRecord& record(const tsstore::SeriesPath& series, ChangeOp op);

  tsstore::SeriesStore& store_;
  Publisher& publisher_;
  std::map<tsstore::SeriesPath, std::uint64_t> seq_;
  std::vector<ChangeRecord> pending_;
};

/// Applies one record to a store (the replica side of ChangeCapture).
void apply_change(tsstore::SeriesStore& store, const ChangeRecord& r);

}  // namespace ced::coherence
