#include "abhsf/decode.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "abhsf/error.hpp"

namespace abhsf {

namespace {

template <class T>
T next_value(const std::vector<T>& stream, std::size_t& pos, const char* name) {
  if (pos >= stream.size()) {
    fail(ErrorKind::kTruncatedDataset,
         std::string(name) + " exhausted at position " + std::to_string(pos));
  }
  return stream[pos++];
}

std::string block_label(const BlockDescriptor& d) {
  return "block (" + std::to_string(d.brow) + ", " + std::to_string(d.bcol) + ")";
}

}  // namespace

void check_exhausted(const AbhsfPayload& p, const DecodeCursor& c) {
  auto check = [](const char* name, std::size_t pos, std::size_t size) {
    if (pos != size) {
      fail(ErrorKind::kTrailingData, std::string(name) + " has " + std::to_string(size - pos) +
                                         " unconsumed entries");
    }
  };
  check("coo_lrows", c.coo_lrows, p.coo_lrows.size());
  check("coo_lcols", c.coo_lcols, p.coo_lcols.size());
  check("coo_vals", c.coo_vals, p.coo_vals.size());
  check("csr_lcolinds", c.csr_lcolinds, p.csr_lcolinds.size());
  check("csr_rowptrs", c.csr_rowptrs, p.csr_rowptrs.size());
  check("csr_vals", c.csr_vals, p.csr_vals.size());
  check("bitmap_bitmap", c.bitmap_bitmap, p.bitmap_bitmap.size());
  check("bitmap_vals", c.bitmap_vals, p.bitmap_vals.size());
  check("dense_vals", c.dense_vals, p.dense_vals.size());
}

void decode_block_coo(const AbhsfPayload& p, DecodeCursor& c, std::uint64_t zeta,
                      std::uint64_t brow, std::uint64_t bcol, std::uint64_t s,
                      std::vector<Element>& out) {
  for (std::uint64_t l = 0; l < zeta; ++l) {
    const std::uint64_t lrow = next_value(p.coo_lrows, c.coo_lrows, "coo_lrows");
    const std::uint64_t lcol = next_value(p.coo_lcols, c.coo_lcols, "coo_lcols");
    const double val = next_value(p.coo_vals, c.coo_vals, "coo_vals");
    out.push_back({lrow + brow * s, lcol + bcol * s, val});
  }
}

void decode_block_csr(const AbhsfPayload& p, DecodeCursor& c, std::uint64_t brow,
                      std::uint64_t bcol, std::uint64_t s, std::vector<Element>& out) {
  std::uint64_t first = next_value(p.csr_rowptrs, c.csr_rowptrs, "csr_rowptrs");
  for (std::uint64_t lrow = 0; lrow < s; ++lrow) {
    const std::uint64_t last = next_value(p.csr_rowptrs, c.csr_rowptrs, "csr_rowptrs");
    if (last < first) {
      fail(ErrorKind::kCorruptBlock, "csr row pointers decrease in block (" +
                                         std::to_string(brow) + ", " + std::to_string(bcol) + ")");
    }
    for (std::uint64_t ptr = first; ptr < last; ++ptr) {
      const std::uint64_t lcol = next_value(p.csr_lcolinds, c.csr_lcolinds, "csr_lcolinds");
      const double val = next_value(p.csr_vals, c.csr_vals, "csr_vals");
      out.push_back({lrow + brow * s, lcol + bcol * s, val});
    }
    first = last;
  }
}

void decode_block_bitmap(const AbhsfPayload& p, DecodeCursor& c, std::uint64_t brow,
                         std::uint64_t bcol, std::uint64_t s, std::vector<Element>& out) {
  unsigned bit = 8;
  std::uint8_t byte = 0;
  for (std::uint64_t lrow = 0; lrow < s; ++lrow) {
    for (std::uint64_t lcol = 0; lcol < s; ++lcol) {
      if (bit > 7) {
        byte = next_value(p.bitmap_bitmap, c.bitmap_bitmap, "bitmap_bitmap");
        bit = 0;
      }
      if (byte & 1u) {
        const double val = next_value(p.bitmap_vals, c.bitmap_vals, "bitmap_vals");
        out.push_back({lrow + brow * s, lcol + bcol * s, val});
      }
      byte = static_cast<std::uint8_t>(byte >> 1);
      ++bit;
    }
  }
  // After the last cell, `byte` holds the unused high bits of the final byte.
  if (byte != 0) {
    fail(ErrorKind::kCorruptBlock, "bitmap padding bits set in block (" + std::to_string(brow) +
                                       ", " + std::to_string(bcol) + ")");
  }
}

void decode_block_dense(const AbhsfPayload& p, DecodeCursor& c, std::uint64_t brow,
                        std::uint64_t bcol, std::uint64_t s, std::vector<Element>& out) {
  for (std::uint64_t lrow = 0; lrow < s; ++lrow) {
    for (std::uint64_t lcol = 0; lcol < s; ++lcol) {
      const double val = next_value(p.dense_vals, c.dense_vals, "dense_vals");
      if (val != 0.0) {
        out.push_back({lrow + brow * s, lcol + bcol * s, val});
      } else if (std::bit_cast<std::uint64_t>(val) != 0) {
        fail(ErrorKind::kCorruptBlock, "negative zero stored in dense block (" +
                                           std::to_string(brow) + ", " + std::to_string(bcol) +
                                           ")");
      }
    }
  }
}

void load_block(const AbhsfPayload& p, DecodeCursor& c, std::uint8_t scheme,
                const BlockDescriptor& d, std::uint64_t s, std::vector<Element>& out) {
  const std::size_t before = out.size();
  switch (scheme) {
    case static_cast<std::uint8_t>(SchemeTag::kCoo):
      decode_block_coo(p, c, d.zeta, d.brow, d.bcol, s, out);
      break;
    case static_cast<std::uint8_t>(SchemeTag::kCsr):
      decode_block_csr(p, c, d.brow, d.bcol, s, out);
      break;
    case static_cast<std::uint8_t>(SchemeTag::kBitmap):
      decode_block_bitmap(p, c, d.brow, d.bcol, s, out);
      break;
    case static_cast<std::uint8_t>(SchemeTag::kDense):
      decode_block_dense(p, c, d.brow, d.bcol, s, out);
      break;
    default:
      fail(ErrorKind::kWrongSchemeTag,
           block_label(d) + " has tag " + std::to_string(static_cast<int>(scheme)));
  }
  const std::size_t got = out.size() - before;
  if (got != d.zeta) {
    fail(ErrorKind::kZetaMismatch, block_label(d) + " decoded " + std::to_string(got) +
                                       " elements, zeta is " + std::to_string(d.zeta));
  }
}

void for_each_block(const AbhsfPayload& p, const BlockSink& sink) {
  const std::uint64_t s = p.block_size;
  if (s < 1 || s > kMaxBlockSize) {
    fail(ErrorKind::kConsistency, "block_size " + std::to_string(s) + " out of range");
  }

  std::size_t zpos = 0;
  std::uint64_t zeta_sum = 0;
  for (std::uint64_t k = 0; k < p.blocks; ++k) zeta_sum += next_value(p.zetas, zpos, "zetas");
  if (zeta_sum != p.z_local) {
    fail(ErrorKind::kConsistency, "sum(zetas) = " + std::to_string(zeta_sum) +
                                      " but z_local = " + std::to_string(p.z_local));
  }

  DecodeCursor cursor;
  std::size_t spos = 0, rpos = 0, cpos = 0;
  std::vector<Element> scratch;
  std::uint64_t last_brow = 0;
  for (std::uint64_t k = 0; k < p.blocks; ++k) {
    const std::uint8_t scheme = next_value(p.schemes, spos, "schemes");
    BlockDescriptor d;
    d.zeta = p.zetas[k];
    d.brow = next_value(p.brows, rpos, "brows");
    d.bcol = next_value(p.bcols, cpos, "bcols");
    if (k > 0 && d.brow < last_brow) {
      fail(ErrorKind::kCorruptBlock, block_label(d) + " follows block row " +
                                         std::to_string(last_brow));
    }
    last_brow = d.brow;

    scratch.clear();
    load_block(p, cursor, scheme, d, s, scratch);
    d.scheme = static_cast<SchemeTag>(scheme);
    for (const auto& e : scratch) {
      if (e.row >= p.m_local || e.col >= p.n_local) {
        fail(ErrorKind::kCorruptBlock, block_label(d) + " element (" + std::to_string(e.row) +
                                           ", " + std::to_string(e.col) +
                                           ") outside local submatrix");
      }
    }
    sink(d, scratch);
  }
  for (const auto& [name, size] : {std::pair<const char*, std::size_t>{"schemes", p.schemes.size()},
                                   {"zetas", p.zetas.size()},
                                   {"brows", p.brows.size()},
                                   {"bcols", p.bcols.size()}}) {
    if (size != p.blocks) {
      fail(ErrorKind::kTrailingData, std::string(name) + " holds " + std::to_string(size) +
                                         " entries for " + std::to_string(p.blocks) + " blocks");
    }
  }
  check_exhausted(p, cursor);
}

CsrMatrix load_rank_file(const AbhsfPayload& p) {
  CsrMatrix csr;
  csr.m = p.m;
  csr.n = p.n;
  csr.z = p.z;
  csr.m_local = p.m_local;
  csr.n_local = p.n_local;
  csr.z_local = p.z_local;
  csr.m_offset = p.m_offset;
  csr.n_offset = p.n_offset;
  csr.rowptrs.clear();
  csr.rowptrs.reserve(p.m_local + 1);
  csr.colinds.reserve(p.z_local);
  csr.vals.reserve(p.z_local);

  const std::uint64_t s = p.block_size;
  std::vector<Element> pending;
  std::uint64_t next_row = 0;  // first row whose start pointer is not yet emitted

  // Emits the pending elements of block row `brow`, sorted, and the row
  // pointers of every row up to the end of that block row.
  auto flush = [&](std::uint64_t brow) {
    std::stable_sort(pending.begin(), pending.end(), coord_less);
    for (std::size_t l = 0; l < pending.size(); ++l) {
      const auto& e = pending[l];
      if (l > 0 && pending[l - 1].row == e.row && pending[l - 1].col == e.col) {
        fail(ErrorKind::kCorruptBlock, "duplicate element (" + std::to_string(e.row) + ", " +
                                           std::to_string(e.col) + ") in block row " +
                                           std::to_string(brow));
      }
      while (next_row <= e.row) {
        csr.rowptrs.push_back(csr.colinds.size());
        ++next_row;
      }
      csr.colinds.push_back(e.col);
      csr.vals.push_back(e.val);
    }
    const std::uint64_t end = std::min((brow + 1) * s, p.m_local);
    while (next_row < end) {
      csr.rowptrs.push_back(csr.colinds.size());
      ++next_row;
    }
    pending.clear();
  };

  std::uint64_t k = 0;
  for_each_block(p, [&](const BlockDescriptor& d, std::span<const Element> elements) {
    pending.insert(pending.end(), elements.begin(), elements.end());
    const bool last = k + 1 == p.blocks || k + 1 >= p.brows.size();
    if (last || p.brows[k + 1] != d.brow) flush(d.brow);
    ++k;
  });

  while (next_row <= p.m_local) {
    csr.rowptrs.push_back(csr.colinds.size());
    ++next_row;
  }
  return csr;
}

}  // namespace abhsf
