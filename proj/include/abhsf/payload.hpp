#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "abhsf/sparse.hpp"

namespace abhsf {

enum class SchemeTag : std::uint8_t { kCoo = 0, kCsr = 1, kBitmap = 2, kDense = 3 };

inline constexpr std::uint8_t kSchemeTagCount = 4;

std::string_view to_string(SchemeTag tag) noexcept;
std::optional<SchemeTag> scheme_from_byte(std::uint8_t raw) noexcept;

// Storage widths of the per-scheme streams. The container dtypes and the
// scheme cost model are both derived from these types.
using lindex_t = std::uint16_t;  // in-block row/column index
using browptr_t = std::uint32_t; // in-block CSR row pointer
using bindex_t = std::uint32_t;  // block row/column index, zeta
using scheme_t = std::uint8_t;
using bitmap_t = std::uint8_t;

inline constexpr std::uint64_t kIndexBits = 8 * sizeof(lindex_t);
inline constexpr std::uint64_t kRowPtrBits = 8 * sizeof(browptr_t);
inline constexpr std::uint64_t kValueBits = 8 * sizeof(double);

/// Largest block size whose in-block indexes fit lindex_t and whose s^2 fits
/// bindex_t.
inline constexpr std::uint64_t kMaxBlockSize = 65535;

struct BlockDescriptor {
  bindex_t brow = 0;
  bindex_t bcol = 0;
  bindex_t zeta = 0;
  SchemeTag scheme = SchemeTag::kCoo;

  friend bool operator==(const BlockDescriptor&, const BlockDescriptor&) = default;
};

/// In-memory image of one rank file: 10 header attributes followed by the
/// per-block descriptor datasets and the concatenated per-scheme streams.
struct AbhsfPayload {
  std::uint64_t m = 0;
  std::uint64_t n = 0;
  std::uint64_t z = 0;
  std::uint64_t m_local = 0;
  std::uint64_t n_local = 0;
  std::uint64_t z_local = 0;
  std::uint64_t m_offset = 0;
  std::uint64_t n_offset = 0;
  std::uint64_t block_size = 1;
  std::uint64_t blocks = 0;

  std::vector<scheme_t> schemes;
  std::vector<bindex_t> zetas;
  std::vector<bindex_t> brows;
  std::vector<bindex_t> bcols;

  std::vector<lindex_t> coo_lrows;
  std::vector<lindex_t> coo_lcols;
  std::vector<double> coo_vals;

  std::vector<lindex_t> csr_lcolinds;
  std::vector<browptr_t> csr_rowptrs;
  std::vector<double> csr_vals;

  std::vector<bitmap_t> bitmap_bitmap;
  std::vector<double> bitmap_vals;

  std::vector<double> dense_vals;

  PartitionExtent extent() const noexcept { return {m_offset, n_offset, m_local, n_local}; }
  GlobalHeader header() const noexcept { return {m, n, z}; }

  friend bool operator==(const AbhsfPayload&, const AbhsfPayload&) = default;
};

/// Visits the 23 entries in file order as (name, field&). Header attributes
/// are std::uint64_t lvalues, datasets are std::vector<T> lvalues.
template <class Payload, class Visitor>
void for_each_entry(Payload& p, Visitor&& visit) {
  visit("m", p.m);
  visit("n", p.n);
  visit("z", p.z);
  visit("m_local", p.m_local);
  visit("n_local", p.n_local);
  visit("z_local", p.z_local);
  visit("m_offset", p.m_offset);
  visit("n_offset", p.n_offset);
  visit("block_size", p.block_size);
  visit("blocks", p.blocks);
  visit("schemes", p.schemes);
  visit("zetas", p.zetas);
  visit("brows", p.brows);
  visit("bcols", p.bcols);
  visit("coo_lrows", p.coo_lrows);
  visit("coo_lcols", p.coo_lcols);
  visit("coo_vals", p.coo_vals);
  visit("csr_lcolinds", p.csr_lcolinds);
  visit("csr_rowptrs", p.csr_rowptrs);
  visit("csr_vals", p.csr_vals);
  visit("bitmap_bitmap", p.bitmap_bitmap);
  visit("bitmap_vals", p.bitmap_vals);
  visit("dense_vals", p.dense_vals);
}

inline constexpr std::size_t kEntryCount = 23;
inline constexpr std::size_t kAttributeCount = 10;

/// Bytes of one block's bitmap: ceil(s^2 / 8).
inline std::uint64_t bitmap_bytes_per_block(std::uint64_t s) noexcept { return (s * s + 7) / 8; }

/// Exact number of bits a block of `zeta` nonzeros occupies in the scheme's
/// streams (descriptor datasets excluded). Throws unless 1 <= zeta <= s^2.
std::uint64_t scheme_cost(SchemeTag scheme, std::uint64_t zeta, std::uint64_t s);

/// Checks the structural invariants: header bounds, descriptor lengths,
/// sum(zetas) = z_local, strictly increasing (brow, bcol), and per-scheme
/// stream lengths. Content (bit patterns, row pointers) is left to the
/// decoder. Throws kInvariant.
void validate_payload(const AbhsfPayload& payload);

}  // namespace abhsf
