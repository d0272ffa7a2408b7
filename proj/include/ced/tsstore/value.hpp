#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>

#include "ced/common/bytes.hpp"

namespace ced::tsstore {

/// Milliseconds since epoch.
using Timestamp = std::int64_t;

inline constexpr Timestamp kMinTimestamp = std::numeric_limits<Timestamp>::min();
inline constexpr Timestamp kMaxTimestamp = std::numeric_limits<Timestamp>::max();

// Alternative order matches the on-disk type tag.
using Value = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

enum class DataType : std::uint8_t { kNull = 0, kBoolean = 1, kInt64 = 2, kDouble = 3, kText = 4 };

DataType type_of(const Value& v);
std::string_view type_name(DataType t);
bool is_null(const Value& v);

void encode_value(ByteWriter& w, const Value& v);
Value decode_value(ByteReader& r);
std::size_t encoded_size(const Value& v);

/// Three-way comparison used by predicates and max_value. Integers and doubles
/// compare numerically; other cross-type pairs and nulls are incomparable.
std::optional<int> compare_values(const Value& a, const Value& b);

std::string to_string(const Value& v);

struct DataPoint {
  Timestamp timestamp = 0;
  Value value;

  bool operator==(const DataPoint&) const = default;
};

}  // namespace ced::tsstore
