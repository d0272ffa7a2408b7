#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "ced/tsstore/series_path.hpp"
#include "ced/tsstore/tsblock.hpp"
#include "ced/tsstore/tsfile.hpp"

namespace ced::tsstore {

struct StoreOptions {
  std::size_t chunk_target_rows = 4000;
  std::size_t page_rows = 1000;
};

/// Half-open [lo, hi) time interval.
struct TimeRange {
  Timestamp lo = kMinTimestamp;
  Timestamp hi = kMaxTimestamp;

  bool contains(Timestamp ts) const { return ts >= lo && ts < hi; }
  bool intersects(Timestamp min_ts, Timestamp max_ts) const { return max_ts >= lo && min_ts < hi; }
};

/// Forward iterator over chunk metadata; nothing is loaded until load_chunk_pages.
class ChunkIterator {
 public:
  ChunkIterator() = default;
  explicit ChunkIterator(std::vector<ChunkMeta> chunks) : chunks_(std::move(chunks)) {}

  bool valid() const { return pos_ < chunks_.size(); }
  const ChunkMeta& current() const { return chunks_.at(pos_); }
  void skip_current() { ++pos_; }

  std::size_t position() const { return pos_; }
  std::size_t size() const { return chunks_.size(); }
  const std::vector<ChunkMeta>& chunks() const { return chunks_; }
  std::uint64_t total_rows() const;

 private:
  std::vector<ChunkMeta> chunks_;
  std::size_t pos_ = 0;
};

struct SeriesStats {
  std::uint64_t rows = 0;
  Timestamp min_ts = 0;
  Timestamp max_ts = 0;
  DataType type = DataType::kNull;
};

/// Everything needed to rebuild one series elsewhere, byte for byte.
struct SeriesSnapshot {
  std::vector<Bytes> files;
  std::vector<DataPoint> memtable;
  std::optional<Timestamp> high_water;
};

/// Columnar store: one memtable per series plus immutable CEDF files under `dir`.
/// Mutations (update/erase) rewrite the affected file while keeping its chunk and
/// page boundaries, dropping pages and chunks that become empty.
class SeriesStore {
 public:
  explicit SeriesStore(std::filesystem::path dir, StoreOptions options = {});

  SeriesStore(const SeriesStore&) = delete;
  SeriesStore& operator=(const SeriesStore&) = delete;

  void append(const SeriesPath& series, DataPoint point);
  TsFileHandle flush(const SeriesPath& series, std::optional<std::size_t> chunk_target_rows = std::nullopt,
                     std::optional<std::size_t> page_rows = std::nullopt);
  bool update(const SeriesPath& series, Timestamp ts, Value value);
  bool erase(const SeriesPath& series, Timestamp ts);

  ChunkIterator open_chunk_iterator(const SeriesPath& series, TimeRange range = {}) const;
  std::vector<TsBlock> load_chunk_pages(const ChunkMeta& meta) const;
  std::vector<DataPoint> read_all(const SeriesPath& series) const;

  bool contains(const SeriesPath& series) const;
  std::vector<SeriesPath> list_series() const;
  SeriesStats stats(const SeriesPath& series) const;
  std::size_t memtable_rows(const SeriesPath& series) const;
  std::vector<TsFileHandle> files(const SeriesPath& series) const;

  /// Canonical byte image: every file in order, then the memtable.
  Bytes image(const SeriesPath& series) const;
  SeriesSnapshot export_series(const SeriesPath& series) const;
  void import_series(const SeriesPath& series, const SeriesSnapshot& snapshot);
  void drop_series(const SeriesPath& series);

  const StoreOptions& options() const { return options_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  struct StoredFile {
    std::filesystem::path path;
    std::vector<ChunkMeta> index;
    Timestamp min_ts = 0;
    Timestamp max_ts = 0;
  };
  struct SeriesData {
    std::vector<StoredFile> files;
    std::vector<DataPoint> memtable;
    std::optional<Timestamp> high_water;
  };

  SeriesData& data_for(const SeriesPath& series);
  const SeriesData& existing(const SeriesPath& series) const;
  std::filesystem::path next_file_path(const SeriesPath& series);
  StoredFile store_file(const SeriesPath& series, const Bytes& image);
  bool rewrite_file(const SeriesPath& series, SeriesData& data, std::size_t file_index, Timestamp ts,
                    const std::optional<Value>& replacement);

  std::filesystem::path dir_;
  StoreOptions options_;
  std::map<SeriesPath, SeriesData> series_;
  std::uint64_t generation_ = 0;
};

}  // namespace ced::tsstore
