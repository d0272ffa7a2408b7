#include "ced/tsstore/value.hpp"

#include <cmath>
#include <cstdio>

#include "ced/common/error.hpp"

namespace ced::tsstore {

DataType type_of(const Value& v) { return static_cast<DataType>(v.index()); }

std::string_view type_name(DataType t) {
  switch (t) {
    case DataType::kNull: return "null";
    case DataType::kBoolean: return "boolean";
    case DataType::kInt64: return "int64";
    case DataType::kDouble: return "double";
    case DataType::kText: return "text";
  }
  return "unknown";
}

bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

void encode_value(ByteWriter& w, const Value& v) {
  w.u8(static_cast<std::uint8_t>(v.index()));
  switch (type_of(v)) {
    case DataType::kNull: break;
    case DataType::kBoolean: w.u8(std::get<bool>(v) ? 1 : 0); break;
    case DataType::kInt64: w.i64(std::get<std::int64_t>(v)); break;
    case DataType::kDouble: w.f64(std::get<double>(v)); break;
    case DataType::kText: w.str32(std::get<std::string>(v)); break;
  }
}

Value decode_value(ByteReader& r) {
  auto tag = r.u8();
  switch (static_cast<DataType>(tag)) {
    case DataType::kNull: return std::monostate{};
    case DataType::kBoolean: return r.u8() != 0;
    case DataType::kInt64: return r.i64();
    case DataType::kDouble: return r.f64();
    case DataType::kText: return r.str32();
  }
  throw CedError(ErrorCode::kDecodeError, "unknown value tag " + std::to_string(tag));
}

std::size_t encoded_size(const Value& v) {
  switch (type_of(v)) {
    case DataType::kNull: return 1;
    case DataType::kBoolean: return 2;
    case DataType::kInt64:
    case DataType::kDouble: return 9;
    case DataType::kText: return 5 + std::get<std::string>(v).size();
  }
  return 1;
}

namespace {

template <typename T>
int three_way(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

bool is_numeric(const Value& v) {
  return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}

double as_double(const Value& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

}  // namespace

std::optional<int> compare_values(const Value& a, const Value& b) {
  if (is_null(a) || is_null(b)) return std::nullopt;
  if (a.index() == b.index()) {
    switch (type_of(a)) {
      case DataType::kBoolean: return three_way(std::get<bool>(a), std::get<bool>(b));
      case DataType::kInt64: return three_way(std::get<std::int64_t>(a), std::get<std::int64_t>(b));
      case DataType::kDouble: {
        double x = std::get<double>(a), y = std::get<double>(b);
        if (std::isnan(x) || std::isnan(y)) return std::nullopt;
        return three_way(x, y);
      }
      case DataType::kText: return three_way(std::get<std::string>(a), std::get<std::string>(b));
      case DataType::kNull: return std::nullopt;
    }
  }
  if (is_numeric(a) && is_numeric(b)) {
    double x = as_double(a), y = as_double(b);
    if (std::isnan(x) || std::isnan(y)) return std::nullopt;
    return three_way(x, y);
  }
  return std::nullopt;
}

std::string to_string(const Value& v) {
  switch (type_of(v)) {
    case DataType::kNull: return "null";
    case DataType::kBoolean: return std::get<bool>(v) ? "true" : "false";
    case DataType::kInt64: return std::to_string(std::get<std::int64_t>(v));
    case DataType::kDouble: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(v));
      return buf;
    }
    case DataType::kText: return std::get<std::string>(v);
  }
  return "?";
}

}  // namespace ced::tsstore
