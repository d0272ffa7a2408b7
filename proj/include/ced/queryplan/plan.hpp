#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ced/queryplan/query.hpp"
#include "ced/tsstore/series_path.hpp"
#include "ced/tsstore/series_store.hpp"

namespace ced::queryplan {

struct SeriesInfo {
  tsstore::SeriesPath path;
  tsstore::DataType type = tsstore::DataType::kNull;
  std::uint64_t rows = 0;
  tsstore::Timestamp min_ts = 0;
  tsstore::Timestamp max_ts = 0;
};

/// Metadata view shared by every tier: device aliases plus per-series extents.
class Catalog {
 public:
  void add_alias(std::string alias, tsstore::SeriesPath device);
  void add_series(SeriesInfo info);

  /// Alias or dotted device path. Throws kUnknownSeries / kUnknownPath.
  tsstore::SeriesPath resolve_source(const std::string& source) const;
  const SeriesInfo* find(const tsstore::SeriesPath& series) const;
  const std::map<std::string, tsstore::SeriesPath>& aliases() const { return aliases_; }

  static Catalog from_store(const tsstore::SeriesStore& store, const std::map<std::string, tsstore::SeriesPath>& aliases);

 private:
  std::map<std::string, tsstore::SeriesPath> aliases_;
  std::map<tsstore::SeriesPath, SeriesInfo> series_;
};

enum class OpKind : std::uint8_t { kSeriesScan, kAggregationScan, kFilter, kProject, kMerge };

std::string_view op_kind_name(OpKind k);

struct OperatorNode {
  OpKind kind = OpKind::kSeriesScan;
  std::vector<OperatorNode> children;

  // SeriesScan / AggregationScan
  std::string series;
  std::int32_t source_id = -1;  // pre-order position; scans only
  // AggregationScan
  AggFn agg = AggFn::kCount;
  std::int64_t window_ms = 0;
  tsstore::Timestamp range_lo = 0;
  tsstore::Timestamp range_hi = 0;
  // Filter: predicate applied to column `column`
  std::optional<Predicate> predicate;
  std::uint32_t column = 0;
  // Project: kept column positions; Merge/Project: output column names
  std::vector<std::uint32_t> keep;
  std::vector<std::string> names;

  bool is_scan() const { return kind == OpKind::kSeriesScan || kind == OpKind::kAggregationScan; }
  bool operator==(const OperatorNode&) const = default;
};

inline constexpr std::int32_t kFragmentId = 1;

/// Builds the operator tree. Throws kUnknownSeries when a sensor is missing and
/// kPlanError when the Query breaks its own invariants.
OperatorNode plan(const Query& q, const Catalog& catalog);

/// S-expression form, e.g.
///   (filter :col 0 :pred (= t1 'v999') (series-scan :src 1 :series root.ln.edge1.device1.t1))
std::string serialize(const OperatorNode& n);

const OperatorNode* find_source(const OperatorNode& root, std::int32_t source_id);
std::vector<const OperatorNode*> scan_leaves(const OperatorNode& root);

/// Predicate that may be evaluated at the scan's own tier: the nearest Filter
/// ancestor's predicate when it references the scan's sensor.
std::optional<Predicate> pushable_predicate(const OperatorNode& root, std::int32_t source_id);

}  // namespace ced::queryplan
