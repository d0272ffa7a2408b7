#include "ced/tsstore/series_store.hpp"

#include <algorithm>

#include "ced/common/error.hpp"

namespace ced::tsstore {

std::uint64_t ChunkIterator::total_rows() const {
  std::uint64_t n = 0;
  for (const auto& c : chunks_) n += c.row_count;
  return n;
}

SeriesStore::SeriesStore(std::filesystem::path dir, StoreOptions options) : dir_(std::move(dir)), options_(options) {
  if (options_.chunk_target_rows == 0 || options_.page_rows == 0) {
    throw CedError(ErrorCode::kInvalidConfig, "chunk and page sizes must be positive");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw CedError(ErrorCode::kStorageIo, "cannot create " + dir_.string() + ": " + ec.message());
}

SeriesStore::SeriesData& SeriesStore::data_for(const SeriesPath& series) { return series_[series]; }

const SeriesStore::SeriesData& SeriesStore::existing(const SeriesPath& series) const {
  auto it = series_.find(series);
  if (it == series_.end()) throw CedError(ErrorCode::kUnknownSeries, series.str());
  return it->second;
}

void SeriesStore::append(const SeriesPath& series, DataPoint point) {
  auto& d = data_for(series);
  if (d.high_water && point.timestamp <= *d.high_water) {
    throw CedError(ErrorCode::kOutOfOrderTimestamp, series.str() + " at " + std::to_string(point.timestamp) +
                                                        " after " + std::to_string(*d.high_water));
  }
  d.high_water = point.timestamp;
  d.memtable.push_back(std::move(point));
}

std::filesystem::path SeriesStore::next_file_path(const SeriesPath& series) {
  return dir_ / (series.str() + "-" + std::to_string(++generation_) + ".cedf");
}

SeriesStore::StoredFile SeriesStore::store_file(const SeriesPath& series, const Bytes& image) {
  StoredFile f;
  f.path = next_file_path(series);
  write_file(f.path, image);
  f.index = decode_tsfile_index(image);
  for (auto& m : f.index) m.file = f.path;
  f.min_ts = f.index.front().min_ts;
  f.max_ts = f.index.back().max_ts;
  return f;
}

TsFileHandle SeriesStore::flush(const SeriesPath& series, std::optional<std::size_t> chunk_target_rows,
                                std::optional<std::size_t> page_rows) {
  auto it = series_.find(series);
  if (it == series_.end() || it->second.memtable.empty()) {
    throw CedError(ErrorCode::kEmptyMemtable, "nothing to flush for " + series.str());
  }
  auto& d = it->second;
  auto chunks = partition_rows(d.memtable, chunk_target_rows.value_or(options_.chunk_target_rows),
                               page_rows.value_or(options_.page_rows));
  auto f = store_file(series, encode_tsfile(series.str(), chunks));
  d.files.push_back(f);
  d.memtable.clear();
  return TsFileHandle{f.path, f.index};
}

bool SeriesStore::rewrite_file(const SeriesPath& series, SeriesData& data, std::size_t file_index, Timestamp ts,
                               const std::optional<Value>& replacement) {
  auto& file = data.files[file_index];
  auto chunks = decode_tsfile_chunks(read_file(file.path));
  bool changed = false;
  for (auto& chunk : chunks) {
    for (auto& page : chunk) {
      auto pos = std::lower_bound(page.begin(), page.end(), ts,
                                  [](const DataPoint& p, Timestamp t) { return p.timestamp < t; });
      if (pos == page.end() || pos->timestamp != ts) continue;
      if (replacement) {
        pos->value = *replacement;
      } else {
        page.erase(pos);
      }
      changed = true;
    }
    std::erase_if(chunk, [](const PageRows& p) { return p.empty(); });
  }
  if (!changed) return false;
  std::erase_if(chunks, [](const ChunkLayout& c) { return c.empty(); });

  auto old_path = file.path;
  if (chunks.empty()) {
    data.files.erase(data.files.begin() + static_cast<std::ptrdiff_t>(file_index));
  } else {
    file = store_file(series, encode_tsfile(series.str(), chunks));
  }
  std::error_code ec;
  std::filesystem::remove(old_path, ec);
  return true;
}

namespace {

// Locates ts in the memtable; returns end() when absent.
std::vector<DataPoint>::iterator find_row(std::vector<DataPoint>& rows, Timestamp ts) {
  auto pos = std::lower_bound(rows.begin(), rows.end(), ts,
                              [](const DataPoint& p, Timestamp t) { return p.timestamp < t; });
  return (pos != rows.end() && pos->timestamp == ts) ? pos : rows.end();
}

}  // namespace

bool SeriesStore::update(const SeriesPath& series, Timestamp ts, Value value) {
  auto it = series_.find(series);
  if (it == series_.end()) return false;
  auto& d = it->second;
  if (auto pos = find_row(d.memtable, ts); pos != d.memtable.end()) {
    pos->value = std::move(value);
    return true;
  }
  for (std::size_t i = 0; i < d.files.size(); ++i) {
    if (ts < d.files[i].min_ts || ts > d.files[i].max_ts) continue;
    if (rewrite_file(series, d, i, ts, value)) return true;
  }
  return false;
}

bool SeriesStore::erase(const SeriesPath& series, Timestamp ts) {
  auto it = series_.find(series);
  if (it == series_.end()) return false;
  auto& d = it->second;
  if (auto pos = find_row(d.memtable, ts); pos != d.memtable.end()) {
    d.memtable.erase(pos);
    return true;
  }
  for (std::size_t i = 0; i < d.files.size(); ++i) {
    if (ts < d.files[i].min_ts || ts > d.files[i].max_ts) continue;
    if (rewrite_file(series, d, i, ts, std::nullopt)) return true;
  }
  return false;
}

ChunkIterator SeriesStore::open_chunk_iterator(const SeriesPath& series, TimeRange range) const {
  const auto& d = existing(series);
  std::vector<ChunkMeta> chunks;
  for (const auto& f : d.files) {
    for (const auto& m : f.index) {
      if (range.intersects(m.min_ts, m.max_ts)) chunks.push_back(m);
    }
  }
  if (!d.memtable.empty()) {
    ChunkMeta tail;
    tail.series = series.str();
    tail.row_count = static_cast<std::uint32_t>(d.memtable.size());
    tail.min_ts = d.memtable.front().timestamp;
    tail.max_ts = d.memtable.back().timestamp;
    tail.byte_size = 0;
    for (const auto& p : d.memtable) tail.byte_size += 8 + encoded_size(p.value);
    tail.memtable = std::make_shared<const std::vector<DataPoint>>(d.memtable);
    if (range.intersects(tail.min_ts, tail.max_ts)) chunks.push_back(std::move(tail));
  }
  return ChunkIterator(std::move(chunks));
}

std::vector<TsBlock> SeriesStore::load_chunk_pages(const ChunkMeta& meta) const {
  if (meta.in_memory()) return pack_blocks(meta.series, *meta.memtable);
  auto record = read_file_range(meta.file, meta.offset, meta.byte_size);
  auto pages = decode_chunk_record(record, meta);
  std::vector<DataPoint> rows;
  rows.reserve(meta.row_count);
  for (auto& page : pages) {
    for (auto& p : page) rows.push_back(std::move(p));
  }
  return pack_blocks(meta.series, rows);
}

std::vector<DataPoint> SeriesStore::read_all(const SeriesPath& series) const {
  std::vector<DataPoint> out;
  auto it = open_chunk_iterator(series);
  for (; it.valid(); it.skip_current()) {
    for (const auto& b : load_chunk_pages(it.current())) {
      for (std::size_t i = 0; i < b.row_count(); ++i) out.push_back({b.timestamps[i], b.values()[i]});
    }
  }
  return out;
}

bool SeriesStore::contains(const SeriesPath& series) const { return series_.count(series) != 0; }

std::vector<SeriesPath> SeriesStore::list_series() const {
  std::vector<SeriesPath> out;
  for (const auto& [k, v] : series_) out.push_back(k);
  return out;
}

SeriesStats SeriesStore::stats(const SeriesPath& series) const {
  const auto& d = existing(series);
  SeriesStats s;
  bool first = true;
  auto see = [&](std::uint64_t rows, Timestamp lo, Timestamp hi) {
    s.rows += rows;
    if (first) s.min_ts = lo;
    s.max_ts = hi;
    first = false;
  };
  for (const auto& f : d.files) {
    for (const auto& m : f.index) see(m.row_count, m.min_ts, m.max_ts);
  }
  if (!d.memtable.empty()) {
    see(d.memtable.size(), d.memtable.front().timestamp, d.memtable.back().timestamp);
    s.type = type_of(d.memtable.front().value);
  }
  if (!d.files.empty()) {
    auto it = open_chunk_iterator(series);
    if (it.valid()) {
      auto blocks = load_chunk_pages(it.current());
      if (!blocks.empty() && blocks.front().row_count() > 0) s.type = type_of(blocks.front().values().front());
    }
  }
  return s;
}

std::size_t SeriesStore::memtable_rows(const SeriesPath& series) const { return existing(series).memtable.size(); }

std::vector<TsFileHandle> SeriesStore::files(const SeriesPath& series) const {
  std::vector<TsFileHandle> out;
  for (const auto& f : existing(series).files) out.push_back({f.path, f.index});
  return out;
}

Bytes SeriesStore::image(const SeriesPath& series) const {
  const auto& d = existing(series);
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(d.files.size()));
  for (const auto& f : d.files) w.bytes32(read_file(f.path));
  w.u32(static_cast<std::uint32_t>(d.memtable.size()));
  for (const auto& p : d.memtable) {
    w.i64(p.timestamp);
    encode_value(w, p.value);
  }
  return std::move(w).take();
}

SeriesSnapshot SeriesStore::export_series(const SeriesPath& series) const {
  const auto& d = existing(series);
  SeriesSnapshot snap;
  for (const auto& f : d.files) snap.files.push_back(read_file(f.path));
  snap.memtable = d.memtable;
  snap.high_water = d.high_water;
  return snap;
}

void SeriesStore::import_series(const SeriesPath& series, const SeriesSnapshot& snapshot) {
  drop_series(series);
  auto& d = data_for(series);
  for (const auto& bytes : snapshot.files) d.files.push_back(store_file(series, bytes));
  d.memtable = snapshot.memtable;
  d.high_water = snapshot.high_water;
}

void SeriesStore::drop_series(const SeriesPath& series) {
  auto it = series_.find(series);
  if (it == series_.end()) return;
  for (const auto& f : it->second.files) {
    std::error_code ec;
    std::filesystem::remove(f.path, ec);
  }
  series_.erase(it);
}

}  // namespace ced::tsstore
