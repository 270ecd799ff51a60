#pragma once

// Per-rank container file `matrix-<k>.h5spm`.
//
// Layout (little-endian throughout):
//
//   offset 0   "SPMF" magic (4 bytes)
//          4   u16 format version (= 1)
//          6   u16 entry count (= 23)
//          8   entry table, 48 bytes per entry:
//                32 bytes  name, ASCII, zero padded
//                 1 byte   kind   (0 attribute, 1 dataset)
//                 1 byte   dtype  (0 u8, 1 u16, 2 u32, 3 u64, 4 f64)
//                 6 bytes  reserved, zero
//                 8 bytes  u64 element count (1 for attributes)
//          ... entry payloads in table order, each starting on an 8-byte
//              boundary (zero padding in between), no trailing padding.
//
// Entry order and dtypes are fixed: the 10 u64 header attributes, then
// schemes(u8) zetas brows bcols(u32) coo_lrows coo_lcols(u16) coo_vals(f64)
// csr_lcolinds(u16) csr_rowptrs(u32) csr_vals(f64) bitmap_bitmap(u8)
// bitmap_vals(f64) dense_vals(f64).

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "abhsf/payload.hpp"

namespace abhsf {

inline constexpr char kMagic[4] = {'S', 'P', 'M', 'F'};
inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kFileHeaderBytes = 8;
inline constexpr std::size_t kEntryRecordBytes = 48;
inline constexpr std::size_t kEntryNameBytes = 32;

enum class EntryKind : std::uint8_t { kAttribute = 0, kDataset = 1 };
enum class Dtype : std::uint8_t { kU8 = 0, kU16 = 1, kU32 = 2, kU64 = 3, kF64 = 4 };

std::string_view to_string(EntryKind kind) noexcept;
std::string_view to_string(Dtype dtype) noexcept;
std::size_t dtype_size(Dtype dtype) noexcept;

struct ContainerEntry {
  std::string name;
  EntryKind kind = EntryKind::kAttribute;
  Dtype dtype = Dtype::kU64;
  std::uint64_t count = 0;
  std::uint64_t byte_offset = 0;
};

/// Counts what a load session pulls from storage.
struct IoCounter {
  std::uint64_t file_opens = 0;
  std::uint64_t bytes_read = 0;
};

std::vector<std::uint8_t> serialize_payload(const AbhsfPayload& payload);

/// Inverse of serialize_payload. Validates the table, padding, bounds and
/// every payload invariant.
AbhsfPayload parse_payload(std::span<const std::uint8_t> bytes);

/// Parses and validates just the entry table.
std::vector<ContainerEntry> parse_entry_table(std::span<const std::uint8_t> bytes);

void write_rank_file(const std::filesystem::path& path, const AbhsfPayload& payload);

/// Reads and validates a whole rank file. The counter, if given, records
/// one open and the file's byte length.
AbhsfPayload read_rank_file(const std::filesystem::path& path, IoCounter* counter = nullptr);

/// Reads only the header attributes (dataset vectors stay empty). Used for
/// cross-file consistency checks; not charged to any session counter.
AbhsfPayload read_rank_header(const std::filesystem::path& path);

std::filesystem::path matrix_directory(const std::filesystem::path& root);
std::filesystem::path rank_file_path(const std::filesystem::path& root, std::uint64_t rank);

/// The P rank files under `<root>/matrix`.
struct RankFileSet {
  std::filesystem::path root;
  std::uint64_t ranks = 0;
  std::vector<std::filesystem::path> files;
  GlobalHeader header;
  std::uint64_t block_size = 0;
  std::uint64_t total_bytes = 0;  // sum of file sizes
};

/// Finds matrix-0 .. matrix-(P-1), requiring contiguous numbering, equal
/// (m, n, z, block_size) in every file, and sum of z_local equal to z.
RankFileSet open_file_set(const std::filesystem::path& root);

}  // namespace abhsf
