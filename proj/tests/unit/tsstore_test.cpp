#include <gtest/gtest.h>

#include "ced/common/error.hpp"
#include "ced/tsstore/series_store.hpp"
#include "test_util.hpp"

using namespace ced;
using namespace ced::tsstore;

namespace {

SeriesPath path(const char* s) { return SeriesPath::parse(s); }

std::vector<std::size_t> block_sizes(const SeriesStore& store, const SeriesPath& p) {
  std::vector<std::size_t> out;
  for (auto it = store.open_chunk_iterator(p); it.valid(); it.skip_current())
    for (const auto& b : store.load_chunk_pages(it.current())) out.push_back(b.row_count());
  return out;
}

}  // namespace

TEST(SeriesPath, ParsesSegments) {
  auto p = path("root.ln.edge1.device1.t1");
  EXPECT_EQ(p.depth(), 5u);
  EXPECT_EQ(p.leaf(), "t1");
  EXPECT_EQ(p.str(), "root.ln.edge1.device1.t1");
  EXPECT_THROW(SeriesPath::parse("root..x"), CedError);
  EXPECT_THROW(SeriesPath::parse(""), CedError);
}

TEST(SeriesStore, SingleRowIdentity) {
  test::TempDir d;
  SeriesStore s(d.path());
  auto p = path("root.ln.e1.d1.t3");
  s.append(p, {1, 0.5});
  auto rows = s.read_all(p);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0], (DataPoint{1, 0.5}));
}

TEST(SeriesStore, RejectsNonIncreasingTimestamp) {
  test::TempDir d;
  SeriesStore s(d.path());
  auto p = path("root.ln.e1.d1.t3");
  s.append(p, {5, std::int64_t{1}});
  try {
    s.append(p, {5, std::int64_t{2}});
    FAIL();
  } catch (const CedError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfOrderTimestamp);
  }
}

TEST(SeriesStore, FlushedScanYieldsThousandRowBlocks) {
  test::TempDir d;
  SeriesStore s(d.path());
  auto p = path("root.ln.e1.d1.t1");
  for (int i = 0; i < 2500; ++i) s.append(p, {i, std::int64_t{i}});
  s.flush(p);
  EXPECT_EQ(block_sizes(s, p), (std::vector<std::size_t>{1000, 1000, 500}));
  EXPECT_EQ(s.memtable_rows(p), 0u);
}

TEST(SeriesStore, FlushPartitionsIntoChunksAndPages) {
  test::TempDir d;
  SeriesStore s(d.path(), {4000, 1000});
  auto p = path("root.ln.e1.d1.t1");
  for (int i = 0; i < 10'000; ++i) s.append(p, {i, double(i)});
  auto h = s.flush(p);
  ASSERT_EQ(h.chunk_index.size(), 3u);
  EXPECT_EQ(h.chunk_index[0].row_count, 4000u);
  EXPECT_EQ(h.chunk_index[1].row_count, 4000u);
  EXPECT_EQ(h.chunk_index[2].row_count, 2000u);
  for (const auto& m : h.chunk_index)
    for (const auto& b : s.load_chunk_pages(m)) EXPECT_LE(b.row_count(), 1000u);
  EXPECT_EQ(block_sizes(s, p), (std::vector<std::size_t>{1000, 1000, 1000, 1000, 1000, 1000, 1000, 1000, 1000, 1000}));
}

TEST(SeriesStore, EmptyFlushIsAnError) {
  test::TempDir d;
  SeriesStore s(d.path());
  try {
    s.flush(path("root.a.b"));
    FAIL();
  } catch (const CedError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyMemtable);
  }
}

TEST(SeriesStore, OneRowFlush) {
  test::TempDir d;
  SeriesStore s(d.path());
  auto p = path("root.a.b");
  s.append(p, {7, true});
  auto h = s.flush(p);
  ASSERT_EQ(h.chunk_index.size(), 1u);
  EXPECT_EQ(h.chunk_index[0].row_count, 1u);
  EXPECT_EQ(block_sizes(s, p), std::vector<std::size_t>{1});
}

TEST(SeriesStore, RangeSelectsIntersectingChunks) {
  test::TempDir d;
  SeriesStore s(d.path(), {100, 50});
  auto p = path("root.a.b");
  for (int i = 0; i < 400; ++i) s.append(p, {i * 10, std::int64_t{i}});
  s.flush(p);
  // chunks cover [0,990], [1000,1990], [2000,2990], [3000,3990]
  EXPECT_EQ(s.open_chunk_iterator(p).size(), 4u);
  EXPECT_FALSE(s.open_chunk_iterator(p, {5000, 6000}).valid());
  auto it = s.open_chunk_iterator(p, {1500, 2500});
  ASSERT_EQ(it.size(), 2u);
  EXPECT_EQ(it.chunks()[0].min_ts, 1000);
  EXPECT_EQ(it.chunks()[1].min_ts, 2000);
  // half-open: hi equal to a chunk's min_ts excludes it
  EXPECT_EQ(s.open_chunk_iterator(p, {0, 1000}).size(), 1u);
}

TEST(SeriesStore, ChunkOf4000IsFourBlocks) {
  test::TempDir d;
  SeriesStore s(d.path());
  auto p = path("root.a.b");
  for (int i = 0; i < 4000; ++i) s.append(p, {i, std::int64_t{i}});
  s.flush(p);
  auto it = s.open_chunk_iterator(p);
  auto blocks = s.load_chunk_pages(it.current());
  ASSERT_EQ(blocks.size(), 4u);
  for (const auto& b : blocks) EXPECT_EQ(b.row_count(), 1000u);
}

TEST(SeriesStore, TamperedRowCountIsCorrupt) {
  test::TempDir d;
  SeriesStore s(d.path());
  auto p = path("root.a.b");
  for (int i = 0; i < 10; ++i) s.append(p, {i, std::int64_t{i}});
  s.flush(p);
  auto meta = s.open_chunk_iterator(p).current();
  meta.row_count += 1;
  try {
    s.load_chunk_pages(meta);
    FAIL();
  } catch (const CedError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCorruptChunk);
  }
}

TEST(SeriesStore, UpdateAndEraseKeepLayout) {
  test::TempDir d;
  SeriesStore s(d.path(), {4, 2});
  auto p = path("root.a.b");
  for (int i = 0; i < 10; ++i) s.append(p, {i, std::int64_t{i}});
  s.flush(p);
  EXPECT_TRUE(s.update(p, 3, std::int64_t{33}));
  EXPECT_FALSE(s.update(p, 99, std::int64_t{1}));
  EXPECT_TRUE(s.erase(p, 4));
  EXPECT_TRUE(s.erase(p, 5));
  EXPECT_TRUE(s.erase(p, 6));
  EXPECT_TRUE(s.erase(p, 7));  // second chunk now empty
  auto it = s.open_chunk_iterator(p);
  EXPECT_EQ(it.size(), 2u);
  auto rows = s.read_all(p);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[3], (DataPoint{3, std::int64_t{33}}));
  EXPECT_EQ(rows[4].timestamp, 8);
}

TEST(SeriesStore, ExportImportRoundTripsImage) {
  test::TempDir d;
  SeriesStore a(d / "a"), b(d / "b");
  auto p = path("root.a.b");
  for (int i = 0; i < 50; ++i) a.append(p, {i, std::string("v") + std::to_string(i)});
  a.flush(p);
  a.append(p, {100, std::string("tail")});
  b.import_series(p, a.export_series(p));
  EXPECT_EQ(a.image(p), b.image(p));
  EXPECT_EQ(a.read_all(p), b.read_all(p));
}

TEST(TsFile, EncodeDecodeRoundTrip) {
  std::vector<DataPoint> rows;
  for (int i = 0; i < 25; ++i) rows.push_back({i, i % 3 == 0 ? Value() : Value(double(i) / 4)});
  auto layout = partition_rows(rows, 10, 4);
  ASSERT_EQ(layout.size(), 3u);
  EXPECT_EQ(layout[0].size(), 3u);  // pages 4,4,2
  auto image = encode_tsfile("root.a.b", layout);
  EXPECT_EQ(decode_tsfile_chunks(image), layout);
  auto index = decode_tsfile_index(image);
  ASSERT_EQ(index.size(), 3u);
  EXPECT_EQ(index[2].row_count, 5u);
  EXPECT_EQ(index[2].min_ts, 20);
  EXPECT_EQ(index[2].max_ts, 24);
}

TEST(TsBlock, CodecAndHeaderProbe) {
  TsBlock b = TsBlock::single("root.a.b");
  b.push_row(1, std::int64_t{5});
  b.push_row(2, Value());
  ByteWriter w;
  encode_block(w, b);
  EXPECT_EQ(w.bytes().size(), encoded_block_size(b));
  ByteReader r(w.bytes());
  EXPECT_EQ(decode_block(r), b);

  auto h = TsBlock::header("root.a.b");
  EXPECT_TRUE(h.header_only);
  EXPECT_EQ(h.row_count(), 0u);
  EXPECT_NO_THROW(h.validate());
}

TEST(TsBlock, PackBlocksSplitsAtCapacity) {
  std::vector<DataPoint> rows;
  for (int i = 0; i < 2001; ++i) rows.push_back({i, true});
  auto blocks = pack_blocks("s", rows);
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(blocks[2].row_count(), 1u);
}
