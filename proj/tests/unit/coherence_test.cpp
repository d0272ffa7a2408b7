#include <gtest/gtest.h>

#include "ced/coherence/change_log.hpp"
#include "ced/coherence/cloud_cache.hpp"
#include "ced/coherence/path_catalog.hpp"
#include "ced/common/error.hpp"
#include "test_util.hpp"

using namespace ced;
using namespace ced::coherence;
using tsstore::SeriesPath;
using tsstore::Value;

namespace {

SeriesPath sp(const std::string& s) { return SeriesPath::parse(s); }

ChangeRecord insert_rec(const SeriesPath& p, std::uint64_t seq, std::int64_t ts) {
  ChangeRecord r;
  r.seq = seq;
  r.series = p;
  r.op = ChangeOp::kInsert;
  r.rows = {{ts, std::int64_t{ts}}};
  return r;
}

// Hot, admitted series on a fresh cache.
void make_resident(CloudCache& c, const SeriesPath& p, const tsstore::SeriesStore& edge, std::uint64_t seq) {
  for (std::uint64_t i = 0; i <= c.config().tau_hot; ++i) c.record_access(p, 0.0);
  c.admit(p, edge.export_series(p), seq);
}

}  // namespace

TEST(PathCatalog, LongestPrefixOwner) {
  PathCatalog cat;
  cat.register_prefix(sp("root.ln.edge1"), "edge1");
  EXPECT_EQ(cat.resolve(sp("root.ln.edge1.device1.t1")), "edge1");
  EXPECT_EQ(cat.resolve(sp("root.ln.edge1.device1.t1")), cat.resolve(sp("root.ln.edge1.device1.t3")));
  try {
    cat.resolve(sp("root.ln.edge2.device1.t1"));
    FAIL();
  } catch (const CedError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownPath);
  }
  cat.register_prefix(sp("root.ln.edge1.device9"), "edge9");
  EXPECT_EQ(cat.resolve(sp("root.ln.edge1.device9.t1")), "edge9");
  EXPECT_FALSE(cat.try_resolve(sp("root.other.x")));
}

TEST(CloudCache, SyncScheduledOnCrossingTauHot) {
  test::TempDir d;
  CloudCache c(d.path(), {}, {3, 8, 0.7});
  auto p = sp("root.ln.edge1.device1.t1");
  EXPECT_EQ(c.record_access(p, 0.0), AccessOutcome::kCounted);
  EXPECT_EQ(c.record_access(p, 0.0), AccessOutcome::kCounted);
  EXPECT_EQ(c.record_access(p, 0.0), AccessOutcome::kCounted);
  EXPECT_EQ(c.record_access(p, 0.0), AccessOutcome::kSyncScheduled);
}

TEST(CloudCache, DeferredUnderSaturationThenRetried) {
  test::TempDir d;
  CloudCache c(d.path(), {}, {1, 8, 0.7});
  auto p = sp("root.a.b");
  c.record_access(p, 0.95);
  EXPECT_EQ(c.record_access(p, 0.95), AccessOutcome::kSyncDeferred);
  EXPECT_TRUE(c.retry_deferred(0.9).empty());
  EXPECT_EQ(c.retry_deferred(0.1), std::vector<SeriesPath>{p});
  EXPECT_TRUE(c.entry(p)->sync_pending);
}

TEST(CloudCache, LruEviction) {
  test::TempDir d;
  tsstore::SeriesStore edge(d / "edge");
  CloudCache c(d / "cloud", {}, {0, 2, 0.7});
  std::vector<SeriesPath> ps = {sp("root.a.s1"), sp("root.a.s2"), sp("root.a.s3")};
  for (const auto& p : ps) edge.append(p, {1, 1.0});
  make_resident(c, ps[0], edge, 0);
  make_resident(c, ps[1], edge, 0);
  c.lookup(ps[0], 0);  // s2 becomes least recent
  c.record_access(ps[2], 0.0);
  auto evicted = c.admit(ps[2], edge.export_series(ps[2]), 0);
  ASSERT_TRUE(evicted);
  EXPECT_EQ(*evicted, ps[1]);
  EXPECT_EQ(c.evictions(), 1u);
}

TEST(CloudCache, LookupTracksReplayLag) {
  test::TempDir d;
  tsstore::SeriesStore edge(d / "edge");
  MessageQueue q;
  Publisher pub(q, 100);
  ChangeCapture cap(edge, pub);
  CloudCache c(d / "cloud", {}, {3, 8, 0.7});
  auto p = sp("root.a.b");
  auto never = sp("root.a.never");
  cap.insert(p, {1, std::int64_t{1}});
  cap.publish(0);
  for (auto& m : q.poll(0)) (void)m;
  make_resident(c, p, edge, pub.published_seq(p));
  EXPECT_TRUE(c.lookup(p, pub.published_seq(p)));
  EXPECT_FALSE(c.lookup(never, 0));

  for (int i = 2; i <= 6; ++i) cap.insert(p, {i, std::int64_t{i}});
  cap.publish(0);
  EXPECT_FALSE(c.lookup(p, pub.published_seq(p)));
  for (auto& m : q.poll(0)) c.replay(decode_batch(m));
  EXPECT_TRUE(c.lookup(p, pub.published_seq(p)));
  EXPECT_EQ(c.store().image(p), edge.image(p));
}

TEST(Publisher, BatchingAndOrder) {
  MessageQueue q;
  Publisher pub(q, 100);
  auto p = sp("root.a.b");
  std::vector<ChangeRecord> recs;
  for (std::uint64_t s = 1; s <= 1000; ++s) recs.push_back(insert_rec(p, s, static_cast<std::int64_t>(s)));
  pub.capture_and_publish(recs, 0);
  auto msgs = q.poll(0);
  ASSERT_EQ(msgs.size(), 10u);
  EXPECT_EQ(decode_batch(msgs.front()).first_seq, 1u);
  EXPECT_EQ(decode_batch(msgs.back()).last_seq, 1000u);
}

TEST(Publisher, TwoBatchesInOrderThenGap) {
  MessageQueue q;
  Publisher pub(q, 5);
  auto p = sp("root.a.b");
  std::vector<ChangeRecord> recs;
  for (std::uint64_t s = 1; s <= 10; ++s) recs.push_back(insert_rec(p, s, static_cast<std::int64_t>(s)));
  pub.capture_and_publish(recs, 0);
  EXPECT_EQ(q.size(), 2u);
  try {
    pub.capture_and_publish({insert_rec(p, 12, 12)}, 0);
    FAIL();
  } catch (const CedError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSequenceGap);
  }
  EXPECT_EQ(q.size(), 2u);
  auto msgs = q.poll(0);
  EXPECT_EQ(decode_batch(msgs[0]).last_seq, 5u);
  EXPECT_EQ(decode_batch(msgs[1]).first_seq, 6u);
}

TEST(MessageQueue, DelayedVisibility) {
  MessageQueue q(10);
  q.push({1}, 0);
  q.push({2}, 5);
  EXPECT_TRUE(q.poll(9).empty());
  EXPECT_EQ(q.poll(10).size(), 1u);
  EXPECT_EQ(q.poll(100).size(), 1u);
}

TEST(ChangeBatch, CodecRoundTrip) {
  ChangeBatch b;
  b.first_seq = 3;
  b.last_seq = 4;
  auto r = insert_rec(sp("root.a.b"), 3, 9);
  r.rows.push_back({10, Value(std::string("x"))});
  b.records.push_back(r);
  ChangeRecord f;
  f.seq = 4;
  f.series = sp("root.a.b");
  f.op = ChangeOp::kFlush;
  f.chunk_rows = 4000;
  f.page_rows = 1000;
  b.records.push_back(f);
  EXPECT_EQ(decode_batch(encode_batch(b)), b);
}

TEST(CloudCache, OutOfOrderAndDuplicateReplay) {
  test::TempDir d;
  tsstore::SeriesStore edge(d / "edge");
  MessageQueue q;
  Publisher pub(q, 3);
  ChangeCapture cap(edge, pub);
  CloudCache c(d / "cloud", {}, {0, 8, 0.7});
  auto p = sp("root.a.b");
  cap.insert(p, {0, std::int64_t{0}});
  cap.publish(0);
  q.poll(0);
  c.record_access(p, 0.0);
  c.admit(p, edge.export_series(p), pub.published_seq(p));

  for (int i = 1; i <= 6; ++i) cap.insert(p, {i, std::int64_t{i}});
  cap.update(p, 3, std::int64_t{30});
  cap.erase(p, 5);
  cap.flush(p);
  cap.publish(0);
  auto msgs = q.poll(0);
  ASSERT_EQ(msgs.size(), 3u);
  EXPECT_EQ(c.replay(decode_batch(msgs[1])), ReplayStatus::kBuffered);
  EXPECT_EQ(c.replay(decode_batch(msgs[2])), ReplayStatus::kBuffered);
  EXPECT_EQ(c.replay(decode_batch(msgs[0])), ReplayStatus::kApplied);
  EXPECT_EQ(c.replay(decode_batch(msgs[0])), ReplayStatus::kDuplicate);
  EXPECT_EQ(c.replay(ChangeBatch{}), ReplayStatus::kNoop);
  EXPECT_EQ(c.store().image(p), edge.image(p));
  EXPECT_TRUE(c.lookup(p, pub.published_seq(p)));
}

TEST(CloudCache, ReplayForUnknownSeries) {
  test::TempDir d;
  CloudCache c(d.path(), {}, {});
  ChangeBatch b;
  b.first_seq = b.last_seq = 1;
  b.records.push_back(insert_rec(sp("root.a.b"), 1, 1));
  EXPECT_EQ(c.replay(b), ReplayStatus::kNotResident);
}

TEST(CloudCache, AdmitRequiresHotSeries) {
  test::TempDir d;
  tsstore::SeriesStore edge(d / "edge");
  auto p = sp("root.a.b");
  edge.append(p, {1, 1.0});
  CloudCache c(d / "cloud", {}, {3, 8, 0.7});
  EXPECT_THROW(c.admit(p, edge.export_series(p), 0), CedError);
}

TEST(CacheConfig, Validation) {
  EXPECT_THROW((CacheConfig{3, 0, 0.7}.validate()), CedError);
  EXPECT_THROW((CacheConfig{3, 8, 1.5}.validate()), CedError);
  EXPECT_NO_THROW(CacheConfig{}.validate());
}
