#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ced/common/bytes.hpp"
#include "ced/tsstore/value.hpp"

namespace ced::tsstore {

inline constexpr std::size_t kBlockCapacity = 1000;

/// Columnar batch of timestamped rows. Scan output carries one value column;
/// merged output carries one column per input stream. A header-only block has
/// no rows and no columns and is used as the channel probe.
struct TsBlock {
  std::string series;
  std::vector<Timestamp> timestamps;
  std::vector<std::vector<Value>> columns;
  bool header_only = false;

  static TsBlock header(std::string series);
  static TsBlock single(std::string series);

  std::size_t row_count() const { return timestamps.size(); }
  std::size_t column_count() const { return columns.size(); }
  bool empty() const { return timestamps.empty(); }
  const std::vector<Value>& values() const { return columns.at(0); }

  void push_row(Timestamp ts, Value v);

  /// Throws CedError(kProtocolViolation) when an invariant is broken.
  void validate() const;

  bool operator==(const TsBlock&) const = default;
};

void encode_block(ByteWriter& w, const TsBlock& b);
TsBlock decode_block(ByteReader& r);
std::size_t encoded_block_size(const TsBlock& b);

/// Splits rows into blocks of at most kBlockCapacity rows.
std::vector<TsBlock> pack_blocks(const std::string& series, const std::vector<DataPoint>& rows);

/// Feeds every row (timestamp and each cell) into the checksum.
void hash_rows(Fnv1a& h, const TsBlock& b);

}  // namespace ced::tsstore
