#pragma once

#include <map>

#include "ced/queryplan/plan.hpp"
#include "ced/scanops/agg_scan.hpp"
#include "ced/scanops/relational.hpp"

namespace ced::scanops {

struct BuiltPlan {
  OperatorPtr root;
  std::map<std::int32_t, CollaborativeScan*> scans;  // keyed by source_id
};

/// Instantiates the whole tree against `store`.
BuiltPlan build(const queryplan::OperatorNode& root, const tsstore::SeriesStore& store);

/// One scan leaf resumed at `resume`, topped with the pushed-down predicate
/// when `pushdown` is set and the plan allows it.
struct BuiltFragment {
  OperatorPtr root;
  CollaborativeScan* scan = nullptr;
};
BuiltFragment build_fragment(const queryplan::OperatorNode& root, std::int32_t source_id,
                             const tsstore::SeriesStore& store, const LogicalIndex& resume, bool pushdown);

/// Resumes a scan leaf at `idx`; throws kIndexKindMismatch when the index kind
/// does not fit the leaf.
std::unique_ptr<CollaborativeScan> resume_from_index(const LogicalIndex& idx, const queryplan::OperatorNode& leaf,
                                                     const tsstore::SeriesStore& store, bool query_filter = false);

}  // namespace ced::scanops
