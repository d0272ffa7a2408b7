#pragma once

// CEDF file layout (all integers little-endian):
//
//   header   "CEDF" | version:u16
//   chunk*   record_len:u32 | page_count:u32 | page*
//            page = row_count:u32 | min_ts:i64 | max_ts:i64 | row*
//            row  = ts:i64 | tag:u8 | payload
//            payload: bool u8 | int64 i64 | double f64 bits | text u32 len + utf8 | null none
//   index    entry_count:u32 | entry*
//            entry = path_len:u16 | path | offset:u64 | row_count:u32 | min_ts:i64 | max_ts:i64
//   footer   index_offset:u64 | "CEDF"
//
// Chunk byte sizes are implied by consecutive index offsets.

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "ced/common/bytes.hpp"
#include "ced/tsstore/value.hpp"

namespace ced::tsstore {

inline constexpr std::array<char, 4> kFileMagic{'C', 'E', 'D', 'F'};
inline constexpr std::uint16_t kFileVersion = 1;
inline constexpr std::size_t kFileHeaderSize = 6;
inline constexpr std::size_t kFileFooterSize = 12;

using PageRows = std::vector<DataPoint>;
using ChunkLayout = std::vector<PageRows>;

struct ChunkMeta {
  std::string series;
  std::filesystem::path file;  // empty for the in-memory tail chunk
  std::uint64_t offset = 0;
  std::uint64_t byte_size = 0;
  std::uint32_t row_count = 0;
  Timestamp min_ts = 0;
  Timestamp max_ts = 0;
  std::shared_ptr<const std::vector<DataPoint>> memtable;

  bool in_memory() const { return memtable != nullptr; }
};

struct TsFileHandle {
  std::filesystem::path path;
  std::vector<ChunkMeta> chunk_index;
};

/// Partitions rows into chunks of at most chunk_rows, each split into pages of at most page_rows.
std::vector<ChunkLayout> partition_rows(const std::vector<DataPoint>& rows, std::size_t chunk_rows,
                                        std::size_t page_rows);

Bytes encode_tsfile(const std::string& series, const std::vector<ChunkLayout>& chunks);

/// Parses index + footer from an in-memory image. Throws kStorageIo on a malformed file.
std::vector<ChunkMeta> decode_tsfile_index(std::span<const std::uint8_t> image);

/// Decodes every chunk back into its page layout.
std::vector<ChunkLayout> decode_tsfile_chunks(std::span<const std::uint8_t> image);

/// Decodes one chunk record and checks it against its metadata (kCorruptChunk on mismatch).
ChunkLayout decode_chunk_record(std::span<const std::uint8_t> record, const ChunkMeta& meta);

Bytes read_file(const std::filesystem::path& path);
Bytes read_file_range(const std::filesystem::path& path, std::uint64_t offset, std::uint64_t size);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

TsFileHandle open_tsfile(const std::filesystem::path& path);

}  // namespace ced::tsstore
