#include "ced/tsstore/tsfile.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "ced/common/error.hpp"

namespace ced::tsstore {

std::vector<ChunkLayout> partition_rows(const std::vector<DataPoint>& rows, std::size_t chunk_rows,
                                        std::size_t page_rows) {
  if (chunk_rows == 0 || page_rows == 0) throw CedError(ErrorCode::kInvalidConfig, "chunk/page size must be > 0");
  std::vector<ChunkLayout> chunks;
  for (std::size_t c = 0; c < rows.size(); c += chunk_rows) {
    auto& chunk = chunks.emplace_back();
    auto chunk_end = std::min(rows.size(), c + chunk_rows);
    for (std::size_t p = c; p < chunk_end; p += page_rows) {
      auto page_end = std::min(chunk_end, p + page_rows);
      chunk.emplace_back(rows.begin() + static_cast<std::ptrdiff_t>(p), rows.begin() + static_cast<std::ptrdiff_t>(page_end));
    }
  }
  return chunks;
}

Bytes encode_tsfile(const std::string& series, const std::vector<ChunkLayout>& chunks) {
  ByteWriter w;
  w.raw(std::string_view(kFileMagic.data(), kFileMagic.size()));
  w.u16(kFileVersion);

  struct Entry {
    std::uint64_t offset;
    std::uint32_t rows;
    Timestamp min_ts, max_ts;
  };
  std::vector<Entry> entries;
  for (const auto& chunk : chunks) {
    if (chunk.empty()) continue;
    Entry e{w.size(), 0, chunk.front().front().timestamp, chunk.back().back().timestamp};
    auto len_pos = w.size();
    w.u32(0);
    w.u32(static_cast<std::uint32_t>(chunk.size()));
    for (const auto& page : chunk) {
      w.u32(static_cast<std::uint32_t>(page.size()));
      w.i64(page.front().timestamp);
      w.i64(page.back().timestamp);
      for (const auto& row : page) {
        w.i64(row.timestamp);
        encode_value(w, row.value);
      }
      e.rows += static_cast<std::uint32_t>(page.size());
    }
    w.patch_u32(len_pos, static_cast<std::uint32_t>(w.size() - len_pos - 4));
    entries.push_back(e);
  }

  auto index_offset = w.size();
  w.u32(static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    w.str16(series);
    w.u64(e.offset);
    w.u32(e.rows);
    w.i64(e.min_ts);
    w.i64(e.max_ts);
  }
  w.u64(index_offset);
  w.raw(std::string_view(kFileMagic.data(), kFileMagic.size()));
  return std::move(w).take();
}

namespace {

void check_magic(std::span<const std::uint8_t> bytes, const char* where) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kFileMagic.data(), 4) != 0) {
    throw CedError(ErrorCode::kStorageIo, std::string("bad magic in ") + where);
  }
}

}  // namespace

std::vector<ChunkMeta> decode_tsfile_index(std::span<const std::uint8_t> image) {
  if (image.size() < kFileHeaderSize + kFileFooterSize) throw CedError(ErrorCode::kStorageIo, "file too short");
  check_magic(image.first(4), "header");
  ByteReader hdr(image.subspan(4, 2));
  if (auto version = hdr.u16(); version != kFileVersion) {
    throw CedError(ErrorCode::kStorageIo, "unsupported version " + std::to_string(version));
  }
  check_magic(image.last(4), "footer");
  ByteReader foot(image.subspan(image.size() - kFileFooterSize, 8));
  auto index_offset = foot.u64();
  if (index_offset < kFileHeaderSize || index_offset > image.size() - kFileFooterSize) {
    throw CedError(ErrorCode::kStorageIo, "index offset out of range");
  }
  try {
    ByteReader r(image.subspan(index_offset, image.size() - kFileFooterSize - index_offset));
    auto n = r.u32();
    std::vector<ChunkMeta> out;
    out.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      ChunkMeta m;
      m.series = r.str16();
      m.offset = r.u64();
      m.row_count = r.u32();
      m.min_ts = r.i64();
      m.max_ts = r.i64();
      if (m.offset < kFileHeaderSize || m.offset >= index_offset) {
        throw CedError(ErrorCode::kStorageIo, "chunk offset out of range");
      }
      out.push_back(std::move(m));
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      auto end = i + 1 < out.size() ? out[i + 1].offset : index_offset;
      if (end <= out[i].offset) throw CedError(ErrorCode::kStorageIo, "chunk offsets not increasing");
      out[i].byte_size = end - out[i].offset;
    }
    return out;
  } catch (const CedError& e) {
    if (e.code() == ErrorCode::kDecodeError) throw CedError(ErrorCode::kStorageIo, e.what());
    throw;
  }
}

ChunkLayout decode_chunk_record(std::span<const std::uint8_t> record, const ChunkMeta& meta) {
  ChunkLayout pages;
  std::uint64_t rows = 0;
  try {
    ByteReader r(record);
    auto len = r.u32();
    if (len != record.size() - 4) throw CedError(ErrorCode::kCorruptChunk, "record length mismatch");
    auto page_count = r.u32();
    pages.reserve(page_count);
    for (std::uint32_t p = 0; p < page_count; ++p) {
      auto n = r.u32();
      r.i64();  // page min_ts, re-derived from rows
      r.i64();
      auto& page = pages.emplace_back();
      page.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        DataPoint dp;
        dp.timestamp = r.i64();
        dp.value = decode_value(r);
        page.push_back(std::move(dp));
      }
      rows += n;
    }
  } catch (const CedError& e) {
    if (e.code() == ErrorCode::kDecodeError) throw CedError(ErrorCode::kCorruptChunk, e.what());
    throw;
  }
  if (rows != meta.row_count) {
    throw CedError(ErrorCode::kCorruptChunk, "chunk at offset " + std::to_string(meta.offset) + " stores " +
                                                 std::to_string(rows) + " rows, metadata says " +
                                                 std::to_string(meta.row_count));
  }
  if (rows > 0 && (pages.front().front().timestamp != meta.min_ts || pages.back().back().timestamp != meta.max_ts)) {
    throw CedError(ErrorCode::kCorruptChunk, "chunk time range disagrees with metadata");
  }
  return pages;
}

std::vector<ChunkLayout> decode_tsfile_chunks(std::span<const std::uint8_t> image) {
  auto index = decode_tsfile_index(image);
  std::vector<ChunkLayout> out;
  out.reserve(index.size());
  for (const auto& m : index) out.push_back(decode_chunk_record(image.subspan(m.offset, m.byte_size), m));
  return out;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw CedError(ErrorCode::kStorageIo, "cannot open " + path.string());
  auto size = static_cast<std::size_t>(in.tellg());
  Bytes bytes(size);
  in.seekg(0);
  if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size))) {
    throw CedError(ErrorCode::kStorageIo, "short read on " + path.string());
  }
  return bytes;
}

Bytes read_file_range(const std::filesystem::path& path, std::uint64_t offset, std::uint64_t size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CedError(ErrorCode::kStorageIo, "cannot open " + path.string());
  Bytes bytes(size);
  in.seekg(static_cast<std::streamoff>(offset));
  if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size))) {
    throw CedError(ErrorCode::kStorageIo, "short read on " + path.string());
  }
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CedError(ErrorCode::kStorageIo, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CedError(ErrorCode::kStorageIo, "write failed on " + path.string());
}

TsFileHandle open_tsfile(const std::filesystem::path& path) {
  TsFileHandle h;
  h.path = path;
  h.chunk_index = decode_tsfile_index(read_file(path));
  for (auto& m : h.chunk_index) m.file = path;
  return h;
}

}  // namespace ced::tsstore
