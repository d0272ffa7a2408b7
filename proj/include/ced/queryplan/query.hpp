#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ced/tsstore/value.hpp"

namespace ced::queryplan {

enum class AggFn : std::uint8_t { kCount, kMaxValue };
enum class CompareOp : std::uint8_t { kEq, kLt, kGt, kLe, kGe };

std::string_view agg_name(AggFn fn);
std::string_view op_symbol(CompareOp op);

struct SelectItem {
  std::string sensor;
  std::optional<AggFn> agg;

  bool operator==(const SelectItem&) const = default;
};

struct Predicate {
  std::string sensor;
  CompareOp op = CompareOp::kEq;
  tsstore::Value literal;

  /// Nulls and incomparable types never match.
  bool matches(const tsstore::Value& v) const;
  bool is_text() const { return tsstore::type_of(literal) == tsstore::DataType::kText; }

  bool operator==(const Predicate&) const = default;
};

struct Query {
  std::vector<SelectItem> select;
  std::string source;
  std::optional<Predicate> where;
  std::optional<std::int64_t> group_by_ms;

  bool is_aggregate() const { return group_by_ms.has_value(); }
  bool operator==(const Query&) const = default;
};

/// Grammar (keywords case-insensitive):
///   SELECT item {, item} FROM path [WHERE sensor op literal] [GROUP BY duration] [;]
///   item     = sensor | count(sensor) | max_value(sensor)
///   literal  = 'text' | integer | float
///   duration = integer (ms|s|m|h|d)
/// Throws SyntaxError for malformed text and CedError(kUnsupportedFeature) for
/// well-formed SQL outside the subset (joins, other aggregates, WHERE with GROUP BY...).
Query parse(std::string_view sql);

/// Canonical SQL text; parse(render(q)) == q.
std::string render(const Query& q);

std::string render_literal(const tsstore::Value& v);

}  // namespace ced::queryplan
