#include "ced/scanops/builder.hpp"

#include "ced/common/error.hpp"

namespace ced::scanops {

using queryplan::OperatorNode;
using queryplan::OpKind;

namespace {

OperatorPtr build_node(const OperatorNode& n, const tsstore::SeriesStore& store, bool under_filter, BuiltPlan& out) {
  switch (n.kind) {
    case OpKind::kSeriesScan:
    case OpKind::kAggregationScan: {
      auto idx = n.kind == OpKind::kSeriesScan ? LogicalIndex::row_offset(0) : LogicalIndex::window_start(n.range_lo);
      auto scan = resume_from_index(idx, n, store, under_filter);
      out.scans[n.source_id] = scan.get();
      return scan;
    }
    case OpKind::kFilter:
      return std::make_unique<Filter>(build_node(n.children.at(0), store, true, out), *n.predicate, n.column);
    case OpKind::kProject:
      return std::make_unique<Project>(build_node(n.children.at(0), store, under_filter, out), n.keep);
    case OpKind::kMerge: {
      std::vector<OperatorPtr> children;
      for (const auto& c : n.children) children.push_back(build_node(c, store, under_filter, out));
      std::string name;
      for (const auto& s : n.names) name += (name.empty() ? "" : ",") + s;
      return std::make_unique<Merge>(std::move(children), name);
    }
  }
  throw CedError(ErrorCode::kPlanError, "unknown operator kind");
}

bool has_filter_above(const OperatorNode& n, std::int32_t source_id, bool under) {
  if (n.is_scan()) return n.source_id == source_id && under;
  for (const auto& c : n.children) {
    if (has_filter_above(c, source_id, under || n.kind == OpKind::kFilter)) return true;
  }
  return false;
}

}  // namespace

std::unique_ptr<CollaborativeScan> resume_from_index(const LogicalIndex& idx, const OperatorNode& leaf,
                                                     const tsstore::SeriesStore& store, bool query_filter) {
  auto path = tsstore::SeriesPath::parse(leaf.series);
  if (leaf.kind == OpKind::kSeriesScan) {
    if (idx.kind != LogicalIndex::Kind::kRowOffset) {
      throw CedError(ErrorCode::kIndexKindMismatch, "series scan given " + to_string(idx));
    }
    return std::make_unique<SeriesScan>(store, path, query_filter, idx);
  }
  if (leaf.kind == OpKind::kAggregationScan) {
    if (idx.kind != LogicalIndex::Kind::kWindowStart) {
      throw CedError(ErrorCode::kIndexKindMismatch, "aggregation scan given " + to_string(idx));
    }
    return std::make_unique<AggScan>(store, path, leaf.agg, WindowSpec{leaf.range_lo, leaf.range_hi, leaf.window_ms},
                                     idx);
  }
  throw CedError(ErrorCode::kPlanError, "not a scan leaf");
}

BuiltPlan build(const OperatorNode& root, const tsstore::SeriesStore& store) {
  BuiltPlan out;
  out.root = build_node(root, store, false, out);
  return out;
}

BuiltFragment build_fragment(const OperatorNode& root, std::int32_t source_id, const tsstore::SeriesStore& store,
                             const LogicalIndex& resume, bool pushdown) {
  const auto* leaf = queryplan::find_source(root, source_id);
  if (!leaf) throw CedError(ErrorCode::kPlanError, "no scan with source id " + std::to_string(source_id));
  BuiltFragment f;
  auto scan = resume_from_index(resume, *leaf, store, has_filter_above(root, source_id, false));
  f.scan = scan.get();
  f.root = std::move(scan);
  if (pushdown) {
    if (auto pred = queryplan::pushable_predicate(root, source_id)) {
      f.root = std::make_unique<Filter>(std::move(f.root), *pred, 0);
    }
  }
  return f;
}

}  // namespace ced::scanops
