#include "abhsf/container.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <type_traits>

#include "abhsf/error.hpp"

namespace abhsf {

namespace fs = std::filesystem;

namespace {

template <class T>
struct DtypeOf;
template <>
struct DtypeOf<std::uint8_t> : std::integral_constant<Dtype, Dtype::kU8> {};
template <>
struct DtypeOf<std::uint16_t> : std::integral_constant<Dtype, Dtype::kU16> {};
template <>
struct DtypeOf<std::uint32_t> : std::integral_constant<Dtype, Dtype::kU32> {};
template <>
struct DtypeOf<std::uint64_t> : std::integral_constant<Dtype, Dtype::kU64> {};
template <>
struct DtypeOf<double> : std::integral_constant<Dtype, Dtype::kF64> {};

template <class T>
struct IsVector : std::false_type {};
template <class T>
struct IsVector<std::vector<T>> : std::true_type {};

static_assert(sizeof(lindex_t) * 8 == kIndexBits && sizeof(browptr_t) * 8 == kRowPtrBits,
              "container widths must match the scheme cost model");

template <class T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  std::uint64_t bits;
  if constexpr (std::is_same_v<T, double>) {
    bits = std::bit_cast<std::uint64_t>(value);
  } else {
    bits = value;
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

template <class T>
T get_le(const std::uint8_t* p) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= std::uint64_t{p[i]} << (8 * i);
  if constexpr (std::is_same_v<T, double>) {
    return std::bit_cast<double>(bits);
  } else {
    return static_cast<T>(bits);
  }
}

std::uint64_t align8(std::uint64_t x) { return (x + 7) & ~std::uint64_t{7}; }

struct Expected {
  std::string name;
  EntryKind kind;
  Dtype dtype;
};

const std::vector<Expected>& expected_entries() {
  static const std::vector<Expected> entries = [] {
    std::vector<Expected> out;
    AbhsfPayload dummy;
    for_each_entry(dummy, [&](const char* name, auto& field) {
      using F = std::remove_cvref_t<decltype(field)>;
      if constexpr (IsVector<F>::value) {
        out.push_back({name, EntryKind::kDataset, DtypeOf<typename F::value_type>::value});
      } else {
        out.push_back({name, EntryKind::kAttribute, DtypeOf<F>::value});
      }
    });
    return out;
  }();
  return entries;
}

// `file_size` may exceed bytes.size() when only a prefix of the file was read.
std::vector<ContainerEntry> parse_table(std::span<const std::uint8_t> bytes,
                                        std::uint64_t file_size) {
  if (bytes.size() < kFileHeaderBytes) fail(ErrorKind::kBounds, "file shorter than its header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) fail(ErrorKind::kBadMagic, "expected \"SPMF\"");
  const auto version = get_le<std::uint16_t>(bytes.data() + 4);
  if (version != kFormatVersion) {
    fail(ErrorKind::kBadVersion, "version " + std::to_string(version) + " is not supported");
  }
  const auto count = get_le<std::uint16_t>(bytes.data() + 6);
  if (bytes.size() < kFileHeaderBytes + std::size_t{count} * kEntryRecordBytes) {
    fail(ErrorKind::kBounds, "entry table extends past end of file");
  }

  const auto& expected = expected_entries();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < expected.size(); ++i) index[expected[i].name] = i;

  std::vector<ContainerEntry> entries;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t* rec = bytes.data() + kFileHeaderBytes + i * kEntryRecordBytes;
    const std::size_t len = std::find(rec, rec + kEntryNameBytes, 0) - rec;
    std::string name(reinterpret_cast<const char*>(rec), len);
    const bool clean_padding = std::all_of(rec + len, rec + kEntryNameBytes,
                                           [](std::uint8_t b) { return b == 0; });
    if (!clean_padding || !index.contains(name)) {
      fail(ErrorKind::kUnknownEntry, "entry " + std::to_string(i) + " has unknown name");
    }
    if (!seen.insert(name).second) fail(ErrorKind::kDuplicateEntry, "entry '" + name + "' repeats");

    ContainerEntry e;
    e.name = name;
    const std::uint8_t kind = rec[32];
    const std::uint8_t dtype = rec[33];
    if (kind > 1) fail(ErrorKind::kKindMismatch, "entry '" + name + "' has invalid kind");
    if (dtype > 4) fail(ErrorKind::kDtypeMismatch, "entry '" + name + "' has invalid dtype");
    e.kind = static_cast<EntryKind>(kind);
    e.dtype = static_cast<Dtype>(dtype);
    if (!std::all_of(rec + 34, rec + 40, [](std::uint8_t b) { return b == 0; })) {
      fail(ErrorKind::kInvariant, "entry '" + name + "' has nonzero reserved bytes");
    }
    e.count = get_le<std::uint64_t>(rec + 40);
    entries.push_back(std::move(e));
  }
  for (const auto& want : expected) {
    if (!seen.contains(want.name)) fail(ErrorKind::kMissingEntry, "entry '" + want.name + "'");
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& want = expected[i];
    const auto& got = entries[i];
    if (got.name != want.name) {
      fail(ErrorKind::kEntryOrder, "entry " + std::to_string(i) + " is '" + got.name +
                                       "', expected '" + want.name + "'");
    }
    if (got.kind != want.kind) {
      fail(ErrorKind::kKindMismatch, "entry '" + got.name + "' is " +
                                         std::string(to_string(got.kind)) + ", expected " +
                                         std::string(to_string(want.kind)));
    }
    if (got.dtype != want.dtype) {
      fail(ErrorKind::kDtypeMismatch, "entry '" + got.name + "' is " +
                                          std::string(to_string(got.dtype)) + ", expected " +
                                          std::string(to_string(want.dtype)));
    }
    if (got.kind == EntryKind::kAttribute && got.count != 1) {
      fail(ErrorKind::kInvariant, "attribute '" + got.name + "' has count != 1");
    }
  }

  // Offsets follow from sequential 8-byte-aligned packing.
  std::uint64_t offset = kFileHeaderBytes + std::uint64_t{count} * kEntryRecordBytes;
  for (auto& e : entries) {
    offset = align8(offset);
    e.byte_offset = offset;
    const std::uint64_t width = dtype_size(e.dtype);
    if (offset > file_size || e.count > (file_size - offset) / width) {
      fail(ErrorKind::kBounds, (e.kind == EntryKind::kAttribute ? "attribute '" : "dataset '") +
                                   e.name + "' extends past end of file");
    }
    offset += e.count * width;
  }
  return entries;
}

void check_padding(std::span<const std::uint8_t> bytes, const std::vector<ContainerEntry>& entries,
                   std::uint64_t table_end) {
  std::uint64_t pos = table_end;
  for (const auto& e : entries) {
    for (; pos < e.byte_offset; ++pos) {
      if (bytes[pos] != 0) {
        fail(ErrorKind::kInvariant, "nonzero padding before '" + e.name + "'");
      }
    }
    pos = e.byte_offset + e.count * dtype_size(e.dtype);
  }
  if (pos != bytes.size()) {
    fail(ErrorKind::kBounds, std::to_string(bytes.size() - pos) + " trailing bytes after '" +
                                 entries.back().name + "'");
  }
}

std::vector<std::uint8_t> read_bytes(const fs::path& path, std::size_t limit = SIZE_MAX) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  if (ec) fail(ErrorKind::kIo, "cannot stat " + path.string());
  std::vector<std::uint8_t> bytes(std::min<std::uint64_t>(size, limit));
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
    fail(ErrorKind::kIo, "short read on " + path.string());
  }
  return bytes;
}

}  // namespace

std::string_view to_string(EntryKind kind) noexcept {
  return kind == EntryKind::kAttribute ? "attribute" : "dataset";
}

std::string_view to_string(Dtype dtype) noexcept {
  switch (dtype) {
    case Dtype::kU8: return "u8";
    case Dtype::kU16: return "u16";
    case Dtype::kU32: return "u32";
    case Dtype::kU64: return "u64";
    case Dtype::kF64: return "f64";
  }
  return "?";
}

std::size_t dtype_size(Dtype dtype) noexcept {
  switch (dtype) {
    case Dtype::kU8: return 1;
    case Dtype::kU16: return 2;
    case Dtype::kU32: return 4;
    case Dtype::kU64:
    case Dtype::kF64: return 8;
  }
  return 1;
}

std::vector<std::uint8_t> serialize_payload(const AbhsfPayload& payload) {
  validate_payload(payload);

  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_le<std::uint16_t>(out, kFormatVersion);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(kEntryCount));

  for_each_entry(payload, [&](const char* name, const auto& field) {
    using F = std::remove_cvref_t<decltype(field)>;
    const std::size_t base = out.size();
    out.resize(base + kEntryRecordBytes, 0);
    std::memcpy(out.data() + base, name, std::strlen(name));
    std::vector<std::uint8_t> tail;
    if constexpr (IsVector<F>::value) {
      out[base + 32] = static_cast<std::uint8_t>(EntryKind::kDataset);
      out[base + 33] = static_cast<std::uint8_t>(DtypeOf<typename F::value_type>::value);
      put_le<std::uint64_t>(tail, field.size());
    } else {
      out[base + 32] = static_cast<std::uint8_t>(EntryKind::kAttribute);
      out[base + 33] = static_cast<std::uint8_t>(DtypeOf<F>::value);
      put_le<std::uint64_t>(tail, 1);
    }
    std::copy(tail.begin(), tail.end(), out.begin() + static_cast<std::ptrdiff_t>(base + 40));
  });

  for_each_entry(payload, [&](const char*, const auto& field) {
    using F = std::remove_cvref_t<decltype(field)>;
    out.resize(align8(out.size()), 0);
    if constexpr (IsVector<F>::value) {
      for (const auto& v : field) put_le(out, v);
    } else {
      put_le(out, field);
    }
  });
  return out;
}

std::vector<ContainerEntry> parse_entry_table(std::span<const std::uint8_t> bytes) {
  return parse_table(bytes, bytes.size());
}

AbhsfPayload parse_payload(std::span<const std::uint8_t> bytes) {
  const auto entries = parse_table(bytes, bytes.size());
  check_padding(bytes, entries, kFileHeaderBytes + kEntryCount * kEntryRecordBytes);

  AbhsfPayload p;
  std::size_t i = 0;
  for_each_entry(p, [&](const char*, auto& field) {
    using F = std::remove_cvref_t<decltype(field)>;
    const auto& e = entries[i++];
    const std::uint8_t* src = bytes.data() + e.byte_offset;
    if constexpr (IsVector<F>::value) {
      using T = typename F::value_type;
      field.resize(e.count);
      for (std::uint64_t k = 0; k < e.count; ++k) field[k] = get_le<T>(src + k * sizeof(T));
    } else {
      field = get_le<F>(src);
    }
  });
  validate_payload(p);
  return p;
}

void write_rank_file(const fs::path& path, const AbhsfPayload& payload) {
  const auto bytes = serialize_payload(payload);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out.flush()) fail(ErrorKind::kIo, "write failed for " + path.string());
}

AbhsfPayload read_rank_file(const fs::path& path, IoCounter* counter) {
  const auto bytes = read_bytes(path);
  if (counter) {
    ++counter->file_opens;
    counter->bytes_read += bytes.size();
  }
  try {
    return parse_payload(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.filename().string() + ": " + e.detail());
  }
}

AbhsfPayload read_rank_header(const fs::path& path) {
  // Attributes sit right after the table, one aligned u64 each.
  constexpr std::size_t attr_begin = kFileHeaderBytes + kEntryCount * kEntryRecordBytes;
  constexpr std::size_t attr_end = attr_begin + kAttributeCount * 8;
  static_assert(attr_begin % 8 == 0);
  std::error_code ec;
  const auto file_size = fs::file_size(path, ec);
  if (ec) fail(ErrorKind::kIo, "cannot stat " + path.string());
  const auto bytes = read_bytes(path, attr_end);
  try {
    parse_table(bytes, file_size);
    AbhsfPayload p;
    const std::uint8_t* src = bytes.data() + attr_begin;
    for_each_entry(p, [&](const char*, auto& field) {
      using F = std::remove_cvref_t<decltype(field)>;
      if constexpr (!IsVector<F>::value) {
        field = get_le<F>(src);
        src += sizeof(F);
      }
    });
    return p;
  } catch (const Error& e) {
    throw Error(e.kind(), path.filename().string() + ": " + e.detail());
  }
}

fs::path matrix_directory(const fs::path& root) { return root / "matrix"; }

fs::path rank_file_path(const fs::path& root, std::uint64_t rank) {
  return matrix_directory(root) / ("matrix-" + std::to_string(rank) + ".h5spm");
}

RankFileSet open_file_set(const fs::path& root) {
  const fs::path dir = matrix_directory(root);
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(ErrorKind::kIo, dir.string() + " is not a directory");

  static const std::regex pattern(R"(matrix-(0|[1-9][0-9]*)\.h5spm)");
  std::set<std::uint64_t> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch match;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, match, pattern)) found.insert(std::stoull(match[1].str()));
  }
  if (found.empty()) fail(ErrorKind::kRankGap, "no rank files in " + dir.string());

  RankFileSet set;
  set.root = root;
  set.ranks = *found.rbegin() + 1;
  for (std::uint64_t k = 0; k < set.ranks; ++k) {
    if (!found.contains(k)) {
      fail(ErrorKind::kRankGap, "matrix-" + std::to_string(k) + ".h5spm missing of " +
                                    std::to_string(set.ranks) + " rank files");
    }
    set.files.push_back(rank_file_path(root, k));
  }

  std::uint64_t z_total = 0;
  for (std::uint64_t k = 0; k < set.ranks; ++k) {
    const auto h = read_rank_header(set.files[k]);
    set.total_bytes += fs::file_size(set.files[k]);
    if (k == 0) {
      set.header = h.header();
      set.block_size = h.block_size;
    } else if (h.header() != set.header || h.block_size != set.block_size) {
      fail(ErrorKind::kInconsistentHeaders,
           "matrix-" + std::to_string(k) + ".h5spm disagrees with matrix-0 on m/n/z/block_size");
    }
    z_total += h.z_local;
  }
  if (z_total != set.header.z) {
    fail(ErrorKind::kTotalMismatch, "sum of z_local is " + std::to_string(z_total) +
                                        ", header z is " + std::to_string(set.header.z));
  }
  return set;
}

}  // namespace abhsf
