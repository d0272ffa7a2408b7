#include "ced/tsstore/tsblock.hpp"

#include "ced/common/error.hpp"

namespace ced::tsstore {

TsBlock TsBlock::header(std::string series) {
  TsBlock b;
  b.series = std::move(series);
  b.header_only = true;
  return b;
}

TsBlock TsBlock::single(std::string series) {
  TsBlock b;
  b.series = std::move(series);
  b.columns.resize(1);
  return b;
}

void TsBlock::push_row(Timestamp ts, Value v) {
  timestamps.push_back(ts);
  columns.at(0).push_back(std::move(v));
}

void TsBlock::validate() const {
  auto fail = [](const std::string& m) { throw CedError(ErrorCode::kProtocolViolation, "TsBlock: " + m); };
  if (header_only) {
    if (!timestamps.empty() || !columns.empty()) fail("header-only block carries rows");
    return;
  }
  if (timestamps.empty()) fail("empty data block");
  if (timestamps.size() > kBlockCapacity) fail("more than 1000 rows");
  for (const auto& col : columns) {
    if (col.size() != timestamps.size()) fail("column length differs from row count");
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (timestamps[i] <= timestamps[i - 1]) fail("timestamps not strictly increasing");
  }
}

void encode_block(ByteWriter& w, const TsBlock& b) {
  w.str16(b.series);
  w.u8(b.header_only ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(b.row_count()));
  w.u16(static_cast<std::uint16_t>(b.column_count()));
  for (auto ts : b.timestamps) w.i64(ts);
  for (const auto& col : b.columns) {
    for (const auto& v : col) encode_value(w, v);
  }
}

TsBlock decode_block(ByteReader& r) {
  TsBlock b;
  b.series = r.str16();
  b.header_only = (r.u8() & 1) != 0;
  auto rows = r.u32();
  auto cols = r.u16();
  b.timestamps.reserve(rows);
  for (std::uint32_t i = 0; i < rows; ++i) b.timestamps.push_back(r.i64());
  b.columns.resize(cols);
  for (auto& col : b.columns) {
    col.reserve(rows);
    for (std::uint32_t i = 0; i < rows; ++i) col.push_back(decode_value(r));
  }
  return b;
}

std::size_t encoded_block_size(const TsBlock& b) {
  std::size_t n = 2 + b.series.size() + 1 + 4 + 2 + 8 * b.row_count();
  for (const auto& col : b.columns) {
    for (const auto& v : col) n += encoded_size(v);
  }
  return n;
}

std::vector<TsBlock> pack_blocks(const std::string& series, const std::vector<DataPoint>& rows) {
  std::vector<TsBlock> out;
  for (std::size_t i = 0; i < rows.size(); i += kBlockCapacity) {
    auto& b = out.emplace_back(TsBlock::single(series));
    auto end = std::min(rows.size(), i + kBlockCapacity);
    b.timestamps.reserve(end - i);
    b.columns[0].reserve(end - i);
    for (std::size_t j = i; j < end; ++j) b.push_row(rows[j].timestamp, rows[j].value);
  }
  return out;
}

void hash_rows(Fnv1a& h, const TsBlock& b) {
  ByteWriter w;
  for (std::size_t i = 0; i < b.row_count(); ++i) {
    w.i64(b.timestamps[i]);
    for (const auto& col : b.columns) encode_value(w, col[i]);
  }
  h.update(w.bytes());
}

}  // namespace ced::tsstore
