#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "abhsf/payload.hpp"
#include "abhsf/sparse.hpp"

namespace abhsf {

/// Sequential read positions, one per stream dataset. Every "next value"
/// read advances exactly one position and fails with kTruncatedDataset if
/// the stream is exhausted.
struct DecodeCursor {
  std::size_t coo_lrows = 0;
  std::size_t coo_lcols = 0;
  std::size_t coo_vals = 0;
  std::size_t csr_lcolinds = 0;
  std::size_t csr_rowptrs = 0;
  std::size_t csr_vals = 0;
  std::size_t bitmap_bitmap = 0;
  std::size_t bitmap_vals = 0;
  std::size_t dense_vals = 0;

  friend bool operator==(const DecodeCursor&, const DecodeCursor&) = default;
};

/// Throws kTrailingData naming the first stream the cursor has not fully
/// consumed.
void check_exhausted(const AbhsfPayload& payload, const DecodeCursor& cursor);

// Per-scheme block decoders. Each appends elements whose coordinates are
// relative to the rank's submatrix: row = lrow + brow*s, col = lcol + bcol*s.

void decode_block_coo(const AbhsfPayload& payload, DecodeCursor& cursor, std::uint64_t zeta,
                      std::uint64_t brow, std::uint64_t bcol, std::uint64_t s,
                      std::vector<Element>& out);

/// Reads one leading row pointer and s more; throws kCorruptBlock when they
/// decrease.
void decode_block_csr(const AbhsfPayload& payload, DecodeCursor& cursor, std::uint64_t brow,
                      std::uint64_t bcol, std::uint64_t s, std::vector<Element>& out);

/// Consumes exactly ceil(s^2/8) bytes. Bits past cell s^2-1 in the last byte
/// must be clear.
void decode_block_bitmap(const AbhsfPayload& payload, DecodeCursor& cursor, std::uint64_t brow,
                         std::uint64_t bcol, std::uint64_t s, std::vector<Element>& out);

/// Consumes exactly s^2 values and skips zeros. A skipped cell must hold +0.0
/// bit for bit; anything else (e.g. -0.0) is reported as kCorruptBlock.
void decode_block_dense(const AbhsfPayload& payload, DecodeCursor& cursor, std::uint64_t brow,
                        std::uint64_t bcol, std::uint64_t s, std::vector<Element>& out);

/// Scheme dispatch for one block. Raises kWrongSchemeTag for tags outside
/// 0..3 and kZetaMismatch when the decoded count differs from desc.zeta.
void load_block(const AbhsfPayload& payload, DecodeCursor& cursor, std::uint8_t scheme,
                const BlockDescriptor& desc, std::uint64_t s, std::vector<Element>& out);

using BlockSink = std::function<void(const BlockDescriptor&, std::span<const Element>)>;

/// Decodes every block in file order and hands its elements (rank-local
/// coordinates, bounds-checked against m_local/n_local) to `sink`. Verifies
/// sum(zetas) = z_local, nondecreasing block rows, and stream exhaustion.
void for_each_block(const AbhsfPayload& payload, const BlockSink& sink);

/// Loads one rank's payload into CSR with local indices, flushing the
/// pending elements of each block row in sorted order.
CsrMatrix load_rank_file(const AbhsfPayload& payload);

}  // namespace abhsf
