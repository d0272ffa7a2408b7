#pragma once

#include <cstdint>
#include <string>

#include "ced/common/bytes.hpp"

namespace ced::scanops {

/// Resumable progress marker: rows consumed at chunk granularity for a series
/// scan, or the first unemitted window start for an aggregation scan.
struct LogicalIndex {
  enum class Kind : std::uint8_t { kRowOffset = 0, kWindowStart = 1 };

  Kind kind = Kind::kRowOffset;
  std::int64_t value = 0;

  static LogicalIndex row_offset(std::int64_t rows) { return {Kind::kRowOffset, rows}; }
  static LogicalIndex window_start(std::int64_t ts) { return {Kind::kWindowStart, ts}; }

  bool operator==(const LogicalIndex&) const = default;
};

std::string to_string(const LogicalIndex& idx);
void encode_index(ByteWriter& w, const LogicalIndex& idx);
LogicalIndex decode_index(ByteReader& r);

}  // namespace ced::scanops
