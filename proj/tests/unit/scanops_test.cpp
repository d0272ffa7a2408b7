#include <gtest/gtest.h>

#include <deque>

#include "ced/common/error.hpp"
#include "ced/scanops/agg_scan.hpp"
#include "ced/scanops/builder.hpp"
#include "ced/scanops/relational.hpp"
#include "ced/scanops/series_scan.hpp"
#include "test_util.hpp"

using namespace ced;
using namespace ced::scanops;
using tsstore::DataPoint;
using tsstore::SeriesPath;
using tsstore::SeriesStore;
using tsstore::TsBlock;
using tsstore::Value;

namespace {

const SeriesPath kPath = SeriesPath::parse("root.ln.edge1.device1.t1");

// Flushes one file per entry of `chunks`, each holding a single chunk.
void fill(SeriesStore& s, const std::vector<int>& chunks, std::int64_t step = 1) {
  std::int64_t ts = 0;
  for (int n : chunks) {
    for (int i = 0; i < n; ++i, ts += step) s.append(kPath, {ts, std::int64_t{ts}});
    s.flush(kPath, static_cast<std::size_t>(n));
  }
}

std::vector<TsBlock> blocks_of(Operator& op) {
  std::vector<TsBlock> out;
  ExecCounters c;
  for (;;) {
    auto r = op.next(c);
    if (r.status == NextResult::Status::kDone) return out;
    if (r.status == NextResult::Status::kBlock) out.push_back(std::move(r.block));
  }
}

std::vector<DataPoint> rows_of(const std::vector<TsBlock>& blocks) {
  std::vector<DataPoint> out;
  for (const auto& b : blocks)
    for (std::size_t i = 0; i < b.row_count(); ++i) out.push_back({b.timestamps[i], b.values()[i]});
  return out;
}

class VectorSource : public OperatorPtr::element_type {
 public:
  explicit VectorSource(std::vector<TsBlock> blocks) : blocks_(blocks.begin(), blocks.end()) {}
  NextResult next(ExecCounters&) override {
    if (blocks_.empty()) return NextResult::done();
    auto b = std::move(blocks_.front());
    blocks_.pop_front();
    return NextResult::of(std::move(b));
  }
  bool has_next() const override { return !blocks_.empty(); }

 private:
  std::deque<TsBlock> blocks_;
};

struct ScriptedRemote : RemoteBlockSource {
  std::deque<Pull> script;
  Pull pull() override {
    if (script.empty()) return {};
    auto p = std::move(script.front());
    script.pop_front();
    return p;
  }
  bool finished() const override { return false; }
};

}  // namespace

TEST(SeriesScan, OffsetMovesPerConsumedChunk) {
  test::TempDir d;
  SeriesStore s(d.path());
  fill(s, {4000, 2000});
  SeriesScan scan(s, kPath);
  ExecCounters c;
  std::vector<std::int64_t> offsets;
  for (int i = 0; i < 6; ++i) {
    auto r = scan.next(c);
    ASSERT_EQ(r.status, NextResult::Status::kBlock);
    EXPECT_EQ(r.block.row_count(), 1000u);
    if (i == 3) {
      EXPECT_TRUE(scan.in_flight());
      EXPECT_THROW(scan.export_index(), CedError);
      scan.mark_consumed();
      EXPECT_EQ(scan.export_index(), LogicalIndex::row_offset(4000));
    }
    offsets.push_back(scan.logical_index().value);
  }
  scan.mark_consumed();
  EXPECT_EQ(offsets, (std::vector<std::int64_t>{0, 0, 0, 4000, 4000, 4000}));
  EXPECT_EQ(scan.logical_index().value, 6000);
  EXPECT_EQ(scan.next(c).status, NextResult::Status::kDone);
}

TEST(SeriesScan, EmptySeriesIsDoneImmediately) {
  test::TempDir d;
  SeriesStore s(d.path());
  SeriesScan scan(s, kPath);
  ExecCounters c;
  EXPECT_FALSE(scan.has_next());
  EXPECT_EQ(scan.next(c).status, NextResult::Status::kDone);
}

TEST(SeriesScan, HasNextIsNonDestructive) {
  test::TempDir d;
  SeriesStore s(d.path());
  fill(s, {1500, 700, 2});
  SeriesScan a(s, kPath), b(s, kPath);
  auto plain = blocks_of(a);
  std::vector<TsBlock> polled;
  ExecCounters c;
  while (b.has_next() && b.has_next()) {
    auto r = b.next(c);
    if (r.status == NextResult::Status::kBlock) polled.push_back(std::move(r.block));
  }
  EXPECT_EQ(plain, polled);
}

TEST(SkipToOffset, HandTrace) {
  test::TempDir d;
  SeriesStore s(d.path());
  fill(s, {4000, 4000, 2000});
  for (bool qf : {false, true}) {
    auto it = s.open_chunk_iterator(kPath);
    EXPECT_EQ(skip_to_offset(8000, it, qf), 0);
    EXPECT_EQ(it.position(), 2u);

    auto same = s.open_chunk_iterator(kPath);
    EXPECT_EQ(skip_to_offset(0, same, qf), 0);
    EXPECT_EQ(same.position(), 0u);

    auto end = s.open_chunk_iterator(kPath);
    EXPECT_EQ(skip_to_offset(10000, end, qf), 0);
    EXPECT_FALSE(end.valid());

    auto inside = s.open_chunk_iterator(kPath);
    try {
      skip_to_offset(5000, inside, qf);
      FAIL();
    } catch (const CedError& e) {
      EXPECT_EQ(e.code(), ErrorCode::kIntraChunkOffset);
    }
  }
}

TEST(SeriesScan, ResumeEqualsSuffixOfFreshScan) {
  test::TempDir d;
  SeriesStore s(d.path());
  fill(s, {4000, 2000});
  SeriesScan fresh(s, kPath);
  auto all = blocks_of(fresh);
  SeriesScan resumed(s, kPath, false, LogicalIndex::row_offset(4000));
  EXPECT_EQ(blocks_of(resumed), std::vector<TsBlock>(all.begin() + 4, all.end()));
  SeriesScan zero(s, kPath, true, LogicalIndex::row_offset(0));
  EXPECT_EQ(blocks_of(zero), all);
  EXPECT_THROW(SeriesScan(s, kPath, false, LogicalIndex::window_start(0)), CedError);
}

TEST(SeriesScan, PauseHookSwitchesAndResumeSkipsDeliveredRows) {
  test::TempDir d;
  SeriesStore s(d.path());
  fill(s, {2000, 2000, 2000});
  SeriesScan fresh(s, kPath);
  auto expected = rows_of(blocks_of(fresh));

  SeriesScan scan(s, kPath);
  auto remote = std::make_shared<ScriptedRemote>();
  std::optional<LogicalIndex> seen;
  ExecCounters c;
  std::vector<TsBlock> out;
  // Two local blocks (chunk 1), then the switch.
  for (int i = 0; i < 2; ++i) out.push_back(scan.next(c).block);
  scan.request_pause([&](const LogicalIndex& idx) {
    seen = idx;
    return remote;
  });
  // The remote serves chunk 2 plus half of chunk 3, then hands back at 4000.
  SeriesScan tail(s, kPath, false, LogicalIndex::row_offset(2000));
  auto served = blocks_of(tail);
  for (int i = 0; i < 3; ++i) remote->script.push_back({RemoteBlockSource::Pull::Kind::kBlock, served[i], {}});
  remote->script.push_back({RemoteBlockSource::Pull::Kind::kResumeLocal, {}, LogicalIndex::row_offset(4000)});
  for (;;) {
    auto r = scan.next(c);
    if (r.status == NextResult::Status::kDone) break;
    if (r.status == NextResult::Status::kBlock) out.push_back(std::move(r.block));
  }
  ASSERT_TRUE(seen);
  EXPECT_EQ(*seen, LogicalIndex::row_offset(2000));
  EXPECT_EQ(rows_of(out), expected);
}

TEST(AggScan, CountPerFullWindow) {
  test::TempDir d;
  SeriesStore s(d.path());
  fill(s, {4000, 4000, 4000});  // ts 0..11999 at 1 ms
  AggScan scan(s, kPath, queryplan::AggFn::kCount, {0, 12000, 1000});
  auto rows = rows_of(blocks_of(scan));
  ASSERT_EQ(rows.size(), 12u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].timestamp, static_cast<std::int64_t>(i) * 1000);
    EXPECT_EQ(rows[i].value, Value(std::int64_t{1000}));
  }
}

TEST(AggScan, EmptyWindowsEmitZeroAndNull) {
  test::TempDir d;
  SeriesStore s(d.path());
  s.append(kPath, {0, 1.0});
  s.append(kPath, {2500, 2.0});
  s.flush(kPath);
  AggScan count(s, kPath, queryplan::AggFn::kCount, {0, 3000, 1000});
  AggScan max(s, kPath, queryplan::AggFn::kMaxValue, {0, 3000, 1000});
  auto cr = rows_of(blocks_of(count));
  auto mr = rows_of(blocks_of(max));
  ASSERT_EQ(cr.size(), 3u);
  ASSERT_EQ(mr.size(), 3u);
  EXPECT_EQ(cr[1].value, Value(std::int64_t{0}));
  EXPECT_TRUE(tsstore::is_null(mr[1].value));
  EXPECT_EQ(mr[2].value, Value(2.0));
}

TEST(AggScan, MaxValue) {
  test::TempDir d;
  SeriesStore s(d.path());
  s.append(kPath, {0, 1.0});
  s.append(kPath, {1, 497.44467});
  s.append(kPath, {2, 3.5});
  s.flush(kPath);
  AggScan scan(s, kPath, queryplan::AggFn::kMaxValue, {0, 10, 10});
  auto rows = rows_of(blocks_of(scan));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].value, Value(497.44467));
}

TEST(AggScan, CountSkipsChunksInsideOneWindow) {
  test::TempDir d;
  SeriesStore s(d.path());
  fill(s, {100, 100, 100, 100});  // ts 0..399
  ExecCounters with, without;
  AggScan a(s, kPath, queryplan::AggFn::kCount, {0, 400, 200});
  AggScan b(s, kPath, queryplan::AggFn::kCount, {0, 400, 200}, std::nullopt, false);
  std::vector<TsBlock> ra, rb;
  for (auto* p : {&a, &b}) {
    auto& c = p == &a ? with : without;
    auto& out = p == &a ? ra : rb;
    for (;;) {
      auto r = p->next(c);
      if (r.status == NextResult::Status::kDone) break;
      if (r.status == NextResult::Status::kBlock) out.push_back(r.block);
    }
  }
  EXPECT_EQ(rows_of(ra), rows_of(rb));
  EXPECT_EQ(with.chunks_skipped, 4u);
  EXPECT_EQ(with.chunks_loaded, 0u);
  EXPECT_EQ(without.chunks_loaded, 4u);
}

TEST(AggScan, ResumeAtLoIsFreshAndMidRangeIsSuffix) {
  test::TempDir d;
  SeriesStore s(d.path());
  fill(s, {300, 300, 300}, 7);
  WindowSpec spec{0, 6300, 500};
  AggScan fresh(s, kPath, queryplan::AggFn::kMaxValue, spec);
  auto all = rows_of(blocks_of(fresh));
  AggScan at_lo(s, kPath, queryplan::AggFn::kMaxValue, spec, LogicalIndex::window_start(0));
  EXPECT_EQ(rows_of(blocks_of(at_lo)), all);
  ExecCounters c;
  AggScan mid(s, kPath, queryplan::AggFn::kMaxValue, spec, LogicalIndex::window_start(3000));
  std::vector<TsBlock> out;
  for (;;) {
    auto r = mid.next(c);
    if (r.status == NextResult::Status::kDone) break;
    if (r.status == NextResult::Status::kBlock) out.push_back(r.block);
  }
  EXPECT_EQ(rows_of(out), std::vector<DataPoint>(all.begin() + 6, all.end()));
  EXPECT_GE(c.chunks_skipped, 1u);
  EXPECT_THROW(AggScan(s, kPath, queryplan::AggFn::kCount, spec, LogicalIndex::window_start(3001)), CedError);
  EXPECT_THROW(AggScan(s, kPath, queryplan::AggFn::kCount, spec, LogicalIndex::row_offset(0)), CedError);
}

TEST(Filter, SingleMatchAndAlwaysTrue) {
  std::vector<TsBlock> blocks(3, TsBlock::single("s"));
  for (int i = 0; i < 3000; ++i)
    blocks[static_cast<std::size_t>(i / 1000)].push_row(i, std::string(i == 1234 ? "v999" : "v1"));
  queryplan::Predicate eq{"t1", queryplan::CompareOp::kEq, std::string("v999")};
  Filter f(std::make_unique<VectorSource>(blocks), eq);
  auto out = blocks_of(f);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].row_count(), 1u);
  EXPECT_EQ(out[0].timestamps[0], 1234);

  queryplan::Predicate ne{"t1", queryplan::CompareOp::kGe, std::string("")};
  Filter all(std::make_unique<VectorSource>(blocks), ne);
  EXPECT_EQ(blocks_of(all), blocks);
}

TEST(Merge, AlignsOnTimestamp) {
  auto mk = [](std::vector<int> ts, std::int64_t base) {
    auto b = TsBlock::single("s");
    for (int t : ts) b.push_row(t, std::int64_t{base + t});
    return b;
  };
  std::vector<OperatorPtr> same;
  same.push_back(std::make_unique<VectorSource>(std::vector<TsBlock>{mk({1, 2, 3}, 0)}));
  same.push_back(std::make_unique<VectorSource>(std::vector<TsBlock>{mk({1, 2, 3}, 10)}));
  Merge m(std::move(same));
  auto out = blocks_of(m);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].row_count(), 3u);
  EXPECT_EQ(out[0].column_count(), 2u);
  EXPECT_EQ(out[0].columns[1][2], Value(std::int64_t{13}));

  std::vector<OperatorPtr> gaps;
  gaps.push_back(std::make_unique<VectorSource>(std::vector<TsBlock>{mk({1, 3}, 0)}));
  gaps.push_back(std::make_unique<VectorSource>(std::vector<TsBlock>{mk({2, 3}, 10)}));
  Merge g(std::move(gaps));
  auto o = blocks_of(g);
  ASSERT_EQ(o.size(), 1u);
  EXPECT_EQ(o[0].timestamps, (std::vector<std::int64_t>{1, 2, 3}));
  EXPECT_TRUE(tsstore::is_null(o[0].columns[1][0]));
  EXPECT_TRUE(tsstore::is_null(o[0].columns[0][1]));
}

TEST(LogicalIndex, CodecRoundTrip) {
  for (auto idx : {LogicalIndex::row_offset(8000), LogicalIndex::window_start(-300000)}) {
    ByteWriter w;
    encode_index(w, idx);
    ByteReader r(w.bytes());
    EXPECT_EQ(decode_index(r), idx);
  }
  EXPECT_EQ(to_string(LogicalIndex::row_offset(4000)), "RowOffset(4000)");
}
