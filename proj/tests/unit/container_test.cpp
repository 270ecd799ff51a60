#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <functional>
#include <random>

#include "abhsf/container.hpp"
#include "abhsf/encode.hpp"
#include "abhsf/decode.hpp"
#include "abhsf/error.hpp"
#include "abhsf/remap.hpp"
#include "fixtures.hpp"
#include "test_support.hpp"

namespace abhsf {
namespace {

namespace fs = std::filesystem;

using test::error_of;

std::uint64_t u64_at(const std::vector<std::uint8_t>& b, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[at + i];
  return v;
}

std::size_t record(std::size_t entry) { return kFileHeaderBytes + entry * kEntryRecordBytes; }

// Layout read back by hand, without the parser.
TEST(Container, EmptyRankLayoutByHand) {
  const auto bytes = serialize_payload(test::empty_rank_fixture().payload);
  ASSERT_EQ(bytes.size(), 1192u);  // 8 + 23 * 48 + 10 * 8
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "SPMF");
  EXPECT_EQ(bytes[4] | bytes[5] << 8, 1);
  EXPECT_EQ(bytes[6] | bytes[7] << 8, 23);
  const char* names[] = {"m", "n", "z", "m_local", "n_local", "z_local", "m_offset", "n_offset",
                         "block_size", "blocks", "schemes", "zetas", "brows", "bcols",
                         "coo_lrows", "coo_lcols", "coo_vals", "csr_lcolinds", "csr_rowptrs",
                         "csr_vals", "bitmap_bitmap", "bitmap_vals", "dense_vals"};
  const std::uint8_t dtypes[] = {3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 0, 2, 2, 2, 1, 1, 4, 1, 2, 4, 0, 4, 4};
  for (std::size_t i = 0; i < 23; ++i) {
    const auto* rec = bytes.data() + record(i);
    EXPECT_STREQ(reinterpret_cast<const char*>(rec), names[i]);
    EXPECT_EQ(rec[32], i < 10 ? 0 : 1) << names[i];
    EXPECT_EQ(rec[33], dtypes[i]) << names[i];
    for (int r = 34; r < 40; ++r) EXPECT_EQ(rec[r], 0);
    EXPECT_EQ(u64_at(bytes, record(i) + 40), i < 10 ? 1u : 0u) << names[i];
  }
  EXPECT_EQ(u64_at(bytes, 1112), 4u);          // m
  EXPECT_EQ(u64_at(bytes, 1112 + 8 * 8), 4u);  // block_size
}

TEST(Container, SingleCooValueIsTheLastEightBytes) {
  const auto f = test::single_coo_fixture();
  const auto bytes = serialize_payload(f.payload);
  ASSERT_EQ(bytes.size(), 1192u + 7 * 8);
  EXPECT_EQ(u64_at(bytes, bytes.size() - 8), std::bit_cast<std::uint64_t>(-1.5));
  const auto entries = parse_entry_table(bytes);
  EXPECT_EQ(entries[16].name, "coo_vals");
  EXPECT_EQ(entries[16].count * dtype_size(entries[16].dtype), 8u);
}

TEST(Container, RoundTripAndDeterminism) {
  std::mt19937_64 rng(21);
  test::TempDir dir;
  for (int t = 0; t < 40; ++t) {
    const auto a = test::random_matrix(rng, 1 + rng() % 70, 1 + rng() % 70, 0.15);
    const auto ext = compute_extent(a.elements);
    const auto p = encode_rank(localize(a.elements, ext), ext, {a.m, a.n, a.nnz()},
                               1 + rng() % 10);
    write_rank_file(dir / "a.h5spm", p);
    write_rank_file(dir / "b.h5spm", p);
    EXPECT_EQ(test::read_bytes(dir / "a.h5spm"), test::read_bytes(dir / "b.h5spm"));
    EXPECT_EQ(read_rank_file(dir / "a.h5spm"), p);
  }
  for (const auto& f : test::all_fixtures()) {
    write_rank_file(dir / f.file, f.payload);
    EXPECT_EQ(read_rank_file(dir / f.file), f.payload) << f.file;
  }
}

TEST(Container, IoCounterChargesWholeFile) {
  test::TempDir dir;
  const auto f = test::mixed_fixture();
  write_rank_file(dir / "x.h5spm", f.payload);
  IoCounter c;
  read_rank_file(dir / "x.h5spm", &c);
  read_rank_file(dir / "x.h5spm", &c);
  EXPECT_EQ(c.file_opens, 2u);
  EXPECT_EQ(c.bytes_read, 2 * fs::file_size(dir / "x.h5spm"));
}

TEST(Container, WriterRefusesInvalidPayload) {
  test::TempDir dir;
  auto p = test::mixed_fixture().payload;
  p.z_local = 11;
  EXPECT_EQ(error_of([&] { write_rank_file(dir / "bad.h5spm", p); }), ErrorKind::kInvariant);
  EXPECT_FALSE(fs::exists(dir / "bad.h5spm"));
}

class Corrupted : public ::testing::Test {
 protected:
  std::vector<std::uint8_t> bytes = serialize_payload(test::mixed_fixture().payload);

  std::optional<ErrorKind> parse_kind(std::string* msg = nullptr) {
    return error_of([&] { parse_payload(bytes); }, msg);
  }
};

TEST_F(Corrupted, BadMagic) {
  bytes[0] = 'X';
  EXPECT_EQ(parse_kind(), ErrorKind::kBadMagic);
}

TEST_F(Corrupted, BadVersion) {
  bytes[4] = 2;
  EXPECT_EQ(parse_kind(), ErrorKind::kBadVersion);
}

TEST_F(Corrupted, SchemesDeclaredU32IsDtypeMismatch) {
  bytes[record(10) + 33] = static_cast<std::uint8_t>(Dtype::kU32);
  std::string msg;
  EXPECT_EQ(parse_kind(&msg), ErrorKind::kDtypeMismatch);
  EXPECT_NE(msg.find("schemes"), std::string::npos) << msg;
}

TEST_F(Corrupted, KindMismatch) {
  bytes[record(3) + 32] = 1;
  EXPECT_EQ(parse_kind(), ErrorKind::kKindMismatch);
}

TEST_F(Corrupted, UnknownEntry) {
  bytes[record(5)] = 'q';
  EXPECT_EQ(parse_kind(), ErrorKind::kUnknownEntry);
}

TEST_F(Corrupted, SwappedEntriesAreOutOfOrder) {
  std::vector<std::uint8_t> a(bytes.begin() + record(11), bytes.begin() + record(12));
  std::copy(bytes.begin() + record(12), bytes.begin() + record(13), bytes.begin() + record(11));
  std::copy(a.begin(), a.end(), bytes.begin() + record(12));
  EXPECT_EQ(parse_kind(), ErrorKind::kEntryOrder);
}

TEST_F(Corrupted, DuplicateEntry) {
  std::copy(bytes.begin() + record(11), bytes.begin() + record(12), bytes.begin() + record(12));
  EXPECT_EQ(parse_kind(), ErrorKind::kDuplicateEntry);
}

TEST_F(Corrupted, MissingEntry) {
  bytes[6] = 22;
  EXPECT_EQ(parse_kind(), ErrorKind::kMissingEntry);
}

TEST_F(Corrupted, ReservedBytes) {
  bytes[record(0) + 36] = 1;
  EXPECT_EQ(parse_kind(), ErrorKind::kInvariant);
}

TEST_F(Corrupted, TruncatedFinalDatasetNamesIt) {
  bytes.resize(bytes.size() - 3);
  std::string msg;
  EXPECT_EQ(parse_kind(&msg), ErrorKind::kBounds);
  EXPECT_NE(msg.find("dense_vals"), std::string::npos) << msg;
}

TEST_F(Corrupted, TrailingBytes) {
  bytes.push_back(0);
  EXPECT_EQ(parse_kind(), ErrorKind::kBounds);
}

TEST_F(Corrupted, NonzeroPadding) {
  // schemes holds 4 bytes, then 4 bytes of padding before zetas.
  const auto entries = parse_entry_table(bytes);
  bytes[entries[10].byte_offset + 5] = 1;
  EXPECT_EQ(parse_kind(), ErrorKind::kInvariant);
}

TEST_F(Corrupted, SchemeTagOutOfRange) {
  const auto entries = parse_entry_table(bytes);
  bytes[entries[10].byte_offset] = 4;
  std::string msg;
  EXPECT_EQ(parse_kind(&msg), ErrorKind::kWrongSchemeTag);
  EXPECT_EQ(msg.rfind("wrong scheme tag", 0), 0u) << msg;
}

TEST_F(Corrupted, InvariantViolation) {
  const auto entries = parse_entry_table(bytes);
  bytes[entries[5].byte_offset] ^= 1;  // z_local
  EXPECT_EQ(parse_kind(), ErrorKind::kInvariant);
}

TEST(Container, ErrorsNameTheFile) {
  test::TempDir dir;
  auto bytes = serialize_payload(test::mixed_fixture().payload);
  bytes[0] = 0;
  test::write_bytes(dir / "matrix-3.h5spm", bytes);
  std::string msg;
  EXPECT_EQ(error_of([&] { read_rank_file(dir / "matrix-3.h5spm"); }, &msg), ErrorKind::kBadMagic);
  EXPECT_NE(msg.find("matrix-3.h5spm"), std::string::npos) << msg;
  EXPECT_EQ(error_of([&] { read_rank_file(dir / "absent.h5spm"); }), ErrorKind::kIo);
}

TEST(Container, ReadHeaderOnly) {
  test::TempDir dir;
  const auto f = test::mixed_fixture();
  write_rank_file(dir / "h.h5spm", f.payload);
  const auto h = read_rank_header(dir / "h.h5spm");
  EXPECT_EQ(h.z_local, 10u);
  EXPECT_EQ(h.block_size, 4u);
  EXPECT_EQ(h.m_offset, 1u);
  EXPECT_TRUE(h.dense_vals.empty());
}

class FileSet : public ::testing::Test {
 protected:
  test::TempDir dir;
  CooMatrix a;

  void SetUp() override {
    std::mt19937_64 rng(22);
    a = test::random_matrix(rng, 30, 30, 0.2);
    store_file_set(a, build_row_balanced(row_histogram(a), 4), 4, dir.path());
  }
};

TEST_F(FileSet, FourRanks) {
  const auto set = open_file_set(dir.path());
  EXPECT_EQ(set.ranks, 4u);
  EXPECT_EQ(set.header, (GlobalHeader{30, 30, a.nnz()}));
  EXPECT_EQ(set.block_size, 4u);
  std::uint64_t total = 0;
  for (const auto& f : set.files) total += fs::file_size(f);
  EXPECT_EQ(set.total_bytes, total);
}

TEST_F(FileSet, GapIsReported) {
  fs::remove(rank_file_path(dir.path(), 2));
  std::string msg;
  EXPECT_EQ(error_of([&] { open_file_set(dir.path()); }, &msg), ErrorKind::kRankGap);
  EXPECT_NE(msg.find("matrix-2"), std::string::npos) << msg;
}

TEST_F(FileSet, BlockSizeDisagreement) {
  auto p = read_rank_file(rank_file_path(dir.path(), 1));
  const auto ext = p.extent();
  const auto csr = load_rank_file(p);
  const auto re = encode_rank(csr_to_elements(csr), ext, p.header(), 8);
  write_rank_file(rank_file_path(dir.path(), 1), re);
  EXPECT_EQ(error_of([&] { open_file_set(dir.path()); }), ErrorKind::kInconsistentHeaders);
}

TEST_F(FileSet, TotalMismatch) {
  auto p = read_rank_file(rank_file_path(dir.path(), 0));
  auto q = read_rank_file(rank_file_path(dir.path(), 1));
  for (auto* x : {&p, &q}) {
    x->z += 1;
    write_rank_file(rank_file_path(dir.path(), x == &p ? 0 : 1), *x);
  }
  // Ranks 2 and 3 still carry the old z.
  EXPECT_EQ(error_of([&] { open_file_set(dir.path()); }), ErrorKind::kInconsistentHeaders);
  for (std::uint64_t k = 2; k < 4; ++k) {
    auto r = read_rank_file(rank_file_path(dir.path(), k));
    r.z += 1;
    write_rank_file(rank_file_path(dir.path(), k), r);
  }
  EXPECT_EQ(error_of([&] { open_file_set(dir.path()); }), ErrorKind::kTotalMismatch);
}

TEST_F(FileSet, NoFilesAndUnrelatedNames) {
  test::TempDir empty;
  fs::create_directories(matrix_directory(empty.path()));
  test::write_bytes(matrix_directory(empty.path()) / "matrix-01.h5spm", {});
  EXPECT_EQ(error_of([&] { open_file_set(empty.path()); }), ErrorKind::kRankGap);
  test::TempDir none;
  EXPECT_EQ(error_of([&] { open_file_set(none.path()); }), ErrorKind::kIo);
}

}  // namespace
}  // namespace abhsf
