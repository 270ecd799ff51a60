#include "abhsf/encode.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>

#include "abhsf/error.hpp"

namespace abhsf {

std::vector<Block> partition_blocks(std::span<const Element> local, const PartitionExtent& extent,
                                    std::uint64_t s) {
  if (s < 1 || s > kMaxBlockSize) {
    fail(ErrorKind::kInvalidArgument, "block size " + std::to_string(s) + " out of range");
  }
  struct Keyed {
    std::uint64_t brow, bcol;
    Element e;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(local.size());
  for (const auto& e : local) {
    if (e.row >= extent.m_local || e.col >= extent.n_local) {
      fail(ErrorKind::kInvalidArgument, "element (" + std::to_string(e.row) + ", " +
                                            std::to_string(e.col) + ") outside extent");
    }
    if (e.row / s > UINT32_MAX || e.col / s > UINT32_MAX) {
      fail(ErrorKind::kInvalidArgument, "block index exceeds 32 bits; increase the block size");
    }
    keyed.push_back({e.row / s, e.col / s, {e.row % s, e.col % s, e.val}});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.brow != b.brow) return a.brow < b.brow;
    if (a.bcol != b.bcol) return a.bcol < b.bcol;
    return coord_less(a.e, b.e);
  });

  std::vector<Block> blocks;
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    const auto& k = keyed[i];
    if (blocks.empty() || blocks.back().desc.brow != k.brow || blocks.back().desc.bcol != k.bcol) {
      Block b;
      b.desc.brow = static_cast<bindex_t>(k.brow);
      b.desc.bcol = static_cast<bindex_t>(k.bcol);
      blocks.push_back(std::move(b));
    } else if (blocks.back().elements.back().row == k.e.row &&
               blocks.back().elements.back().col == k.e.col) {
      fail(ErrorKind::kDuplicateEntry,
           "coordinate (" + std::to_string(k.brow * s + k.e.row) + ", " +
               std::to_string(k.bcol * s + k.e.col) + ") appears twice");
    }
    blocks.back().elements.push_back(k.e);
  }
  for (auto& b : blocks) {
    b.desc.zeta = static_cast<bindex_t>(b.elements.size());
    b.desc.scheme = select_scheme(b.desc.zeta, s);
  }
  return blocks;
}

SchemeTag select_scheme(std::uint64_t zeta, std::uint64_t s) {
  constexpr std::array kPreference = {SchemeTag::kDense, SchemeTag::kBitmap, SchemeTag::kCsr,
                                      SchemeTag::kCoo};
  SchemeTag best = kPreference.front();
  std::uint64_t best_cost = scheme_cost(best, zeta, s);
  for (auto tag : kPreference) {
    const auto cost = scheme_cost(tag, zeta, s);
    if (cost < best_cost) {
      best = tag;
      best_cost = cost;
    }
  }
  return best;
}

void append_block(AbhsfPayload& p, const Block& block, SchemeTag scheme) {
  const std::uint64_t s = p.block_size;
  p.schemes.push_back(static_cast<scheme_t>(scheme));
  p.zetas.push_back(static_cast<bindex_t>(block.elements.size()));
  p.brows.push_back(block.desc.brow);
  p.bcols.push_back(block.desc.bcol);
  ++p.blocks;
  p.z_local += block.elements.size();

  switch (scheme) {
    case SchemeTag::kCoo:
      for (const auto& e : block.elements) {
        p.coo_lrows.push_back(static_cast<lindex_t>(e.row));
        p.coo_lcols.push_back(static_cast<lindex_t>(e.col));
        p.coo_vals.push_back(e.val);
      }
      break;
    case SchemeTag::kCsr: {
      // s+1 in-block row pointers starting at 0.
      std::size_t next = 0;
      p.csr_rowptrs.push_back(0);
      for (std::uint64_t lrow = 0; lrow < s; ++lrow) {
        while (next < block.elements.size() && block.elements[next].row == lrow) {
          p.csr_lcolinds.push_back(static_cast<lindex_t>(block.elements[next].col));
          p.csr_vals.push_back(block.elements[next].val);
          ++next;
        }
        p.csr_rowptrs.push_back(static_cast<browptr_t>(next));
      }
      break;
    }
    case SchemeTag::kBitmap: {
      // Row-major cells, least significant bit first, padded per block.
      const std::size_t base = p.bitmap_bitmap.size();
      p.bitmap_bitmap.resize(base + bitmap_bytes_per_block(s), 0);
      for (const auto& e : block.elements) {
        const std::uint64_t cell = e.row * s + e.col;
        p.bitmap_bitmap[base + cell / 8] |= static_cast<bitmap_t>(1u << (cell % 8));
        p.bitmap_vals.push_back(e.val);
      }
      break;
    }
    case SchemeTag::kDense: {
      const std::size_t base = p.dense_vals.size();
      p.dense_vals.resize(base + s * s, 0.0);
      for (const auto& e : block.elements) p.dense_vals[base + e.row * s + e.col] = e.val;
      break;
    }
  }
}

AbhsfPayload encode_rank(std::span<const Element> local, const PartitionExtent& extent,
                         const GlobalHeader& header, std::uint64_t s) {
  for (const auto& e : local) {
    if (e.val == 0.0) {
      fail(ErrorKind::kZeroValue, "explicit zero at local (" + std::to_string(e.row) + ", " +
                                      std::to_string(e.col) + ")");
    }
  }
  const auto blocks = partition_blocks(local, extent, s);

  AbhsfPayload p;
  p.m = header.m;
  p.n = header.n;
  p.z = header.z;
  p.m_local = extent.m_local;
  p.n_local = extent.n_local;
  p.m_offset = extent.m_offset;
  p.n_offset = extent.n_offset;
  p.block_size = s;
  for (const auto& b : blocks) append_block(p, b, b.desc.scheme);
  validate_payload(p);
  return p;
}

}  // namespace abhsf
