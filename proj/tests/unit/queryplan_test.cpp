#include <gtest/gtest.h>

#include "ced/common/error.hpp"
#include "ced/queryplan/plan.hpp"
#include "ced/queryplan/query.hpp"

using namespace ced;
using namespace ced::queryplan;

namespace {

Catalog demo_catalog() {
  Catalog c;
  auto dev = tsstore::SeriesPath::parse("root.ln.edge1.device1");
  c.add_alias("dev", dev);
  const tsstore::DataType types[] = {tsstore::DataType::kText, tsstore::DataType::kBoolean, tsstore::DataType::kDouble,
                                     tsstore::DataType::kInt64};
  for (int i = 1; i <= 4; ++i)
    c.add_series({tsstore::SeriesPath::parse("root.ln.edge1.device1.t" + std::to_string(i)), types[(i - 1) % 4], 1000,
                  0, 999'999});
  return c;
}

}  // namespace

TEST(Parse, FilterQuery) {
  auto q = parse("SELECT t1 FROM dev WHERE t1='v999'");
  ASSERT_EQ(q.select.size(), 1u);
  EXPECT_EQ(q.select[0].sensor, "t1");
  EXPECT_FALSE(q.select[0].agg);
  EXPECT_EQ(q.source, "dev");
  ASSERT_TRUE(q.where);
  EXPECT_EQ(q.where->sensor, "t1");
  EXPECT_EQ(q.where->op, CompareOp::kEq);
  EXPECT_EQ(q.where->literal, tsstore::Value(std::string("v999")));
  EXPECT_FALSE(q.is_aggregate());
}

TEST(Parse, GroupByWindow) {
  auto q = parse("SELECT count(t1) FROM dev GROUP BY 5m");
  ASSERT_EQ(q.select.size(), 1u);
  EXPECT_EQ(q.select[0].agg, AggFn::kCount);
  EXPECT_EQ(q.group_by_ms, 300'000);
  EXPECT_EQ(parse("select max_value(t3) from dev group by 2s;").group_by_ms, 2000);
}

TEST(Parse, NumericLiteral) {
  auto q = parse("SELECT t3 FROM dev WHERE t3=497.44467");
  ASSERT_TRUE(q.where);
  EXPECT_EQ(q.where->literal, tsstore::Value(497.44467));
  EXPECT_TRUE(q.where->matches(497.44467));
  EXPECT_FALSE(q.where->matches(497.4446));
  EXPECT_FALSE(q.where->matches(tsstore::Value()));
}

TEST(Parse, MalformedKeywordAtOffsetZero) {
  try {
    parse("SELEKT x");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position(), 0u);
    EXPECT_EQ(e.code(), ErrorCode::kSyntaxError);
  }
}

TEST(Parse, SyntaxErrorOffsets) {
  try {
    parse("SELECT t1 FROM");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position(), 14u);
  }
  EXPECT_THROW(parse("SELECT t1 FROM dev WHERE t1 = 'open"), SyntaxError);
}

TEST(Parse, UnsupportedFeatures) {
  for (const char* sql : {"SELECT t1 FROM dev WHERE t1='a' GROUP BY 1m", "SELECT avg(t1) FROM dev GROUP BY 1m"}) {
    try {
      parse(sql);
      FAIL() << sql;
    } catch (const SyntaxError&) {
      FAIL() << "expected unsupported for " << sql;
    } catch (const CedError& e) {
      EXPECT_EQ(e.code(), ErrorCode::kUnsupportedFeature) << sql;
    }
  }
}

TEST(Parse, RenderRoundTrip) {
  for (const char* sql : {"SELECT t1 FROM dev WHERE t1='v999'", "SELECT t3 FROM dev WHERE t3=497.44467",
                          "SELECT t1, t3 FROM dev", "SELECT count(t1) FROM dev GROUP BY 5m",
                          "SELECT max_value(t3) FROM root.ln.edge1.device1 GROUP BY 90s",
                          "SELECT t4 FROM dev WHERE t4>=-3"}) {
    auto q = parse(sql);
    EXPECT_EQ(parse(render(q)), q) << sql;
  }
}

TEST(Plan, MergeOverTwoScans) {
  auto n = plan(parse("SELECT t1, t3 FROM dev"), demo_catalog());
  auto leaves = scan_leaves(n);
  ASSERT_EQ(leaves.size(), 2u);
  EXPECT_EQ(leaves[0]->kind, OpKind::kSeriesScan);
  EXPECT_EQ(leaves[0]->series, "root.ln.edge1.device1.t1");
  EXPECT_EQ(leaves[1]->series, "root.ln.edge1.device1.t3");
  EXPECT_NE(leaves[0]->source_id, leaves[1]->source_id);
  bool has_merge = n.kind == OpKind::kMerge;
  for (const auto& c : n.children) has_merge = has_merge || c.kind == OpKind::kMerge;
  EXPECT_TRUE(has_merge);
}

TEST(Plan, AggregationLeaf) {
  auto n = plan(parse("SELECT max_value(t3) FROM dev GROUP BY 5m"), demo_catalog());
  auto leaves = scan_leaves(n);
  ASSERT_EQ(leaves.size(), 1u);
  EXPECT_EQ(leaves[0]->kind, OpKind::kAggregationScan);
  EXPECT_EQ(leaves[0]->agg, AggFn::kMaxValue);
  EXPECT_EQ(leaves[0]->window_ms, 300'000);
  EXPECT_EQ(leaves[0]->range_lo, 0);
  EXPECT_EQ(leaves[0]->range_hi, 1'000'000);
}

TEST(Plan, PushablePredicate) {
  auto n = plan(parse("SELECT t1 FROM dev WHERE t1='v999'"), demo_catalog());
  auto leaves = scan_leaves(n);
  ASSERT_EQ(leaves.size(), 1u);
  auto pred = pushable_predicate(n, leaves[0]->source_id);
  ASSERT_TRUE(pred);
  EXPECT_EQ(pred->literal, tsstore::Value(std::string("v999")));
  EXPECT_EQ(find_source(n, leaves[0]->source_id), leaves[0]);
  auto m = plan(parse("SELECT t1, t3 FROM dev"), demo_catalog());
  EXPECT_FALSE(pushable_predicate(m, scan_leaves(m)[0]->source_id));
}

TEST(Plan, DeterministicAcrossReplicas) {
  auto a = demo_catalog(), b = demo_catalog();
  for (const char* sql : {"SELECT t1, t3 FROM dev", "SELECT t1 FROM dev WHERE t1='v999'",
                          "SELECT count(t1) FROM dev GROUP BY 5m"}) {
    EXPECT_EQ(serialize(plan(parse(sql), a)), serialize(plan(parse(sql), b)));
  }
}

TEST(Plan, UnknownSensorAndSource) {
  auto c = demo_catalog();
  try {
    plan(parse("SELECT t9 FROM dev"), c);
    FAIL();
  } catch (const CedError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownSeries);
  }
  EXPECT_THROW(plan(parse("SELECT t1 FROM nowhere"), c), CedError);
}
