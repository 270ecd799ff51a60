#pragma once

#include <span>
#include <vector>

#include "abhsf/payload.hpp"
#include "abhsf/sparse.hpp"

namespace abhsf {

/// One nonempty s×s block. Elements carry in-block (lrow, lcol) coordinates,
/// sorted lexicographically.
struct Block {
  BlockDescriptor desc;
  std::vector<Element> elements;
};

/// Buckets local elements into s×s blocks. Only nonempty blocks are
/// returned, ordered by (brow, bcol); each descriptor's scheme is already
/// select_scheme(zeta, s).
std::vector<Block> partition_blocks(std::span<const Element> local, const PartitionExtent& extent,
                                    std::uint64_t s);

/// argmin of scheme_cost; equal costs resolve DENSE, BITMAP, CSR, COO in
/// that order of preference.
SchemeTag select_scheme(std::uint64_t zeta, std::uint64_t s);

/// Appends the block's descriptor and its stream data under `scheme` (which
/// may differ from block.desc.scheme). `payload.blocks` and `z_local` are
/// bumped accordingly; the caller owns the rest of the header.
void append_block(AbhsfPayload& payload, const Block& block, SchemeTag scheme);

/// Encodes a rank's local elements (indices relative to `extent`).
/// Duplicates, out-of-extent indices, and zero values are rejected.
AbhsfPayload encode_rank(std::span<const Element> local, const PartitionExtent& extent,
                         const GlobalHeader& header, std::uint64_t s);

}  // namespace abhsf
