#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace abhsf {

using index_t = std::uint64_t;

/// One nonzero. Indices are 0-based; whether they are global or local to a
/// rank's submatrix depends on the context the element travels in.
struct Element {
  index_t row = 0;
  index_t col = 0;
  double val = 0.0;

  friend bool operator==(const Element&, const Element&) = default;
};

/// Lexicographic (row, col) order; values do not participate.
inline bool coord_less(const Element& a, const Element& b) noexcept {
  return a.row != b.row ? a.row < b.row : a.col < b.col;
}

/// Bitwise equality, including the value's bit pattern.
bool bitwise_equal(const Element& a, const Element& b) noexcept;
bool bitwise_equal(std::span<const Element> a, std::span<const Element> b) noexcept;

struct CooMatrix {
  index_t m = 0;
  index_t n = 0;
  std::vector<Element> elements;

  index_t nnz() const noexcept { return elements.size(); }
};

/// Tight bounding box of a rank's nonzeros. An empty rank has all four
/// fields zero.
struct PartitionExtent {
  index_t m_offset = 0;
  index_t n_offset = 0;
  index_t m_local = 0;
  index_t n_local = 0;

  friend bool operator==(const PartitionExtent&, const PartitionExtent&) = default;
};

/// Global dimensions and nonzero count of the whole distributed matrix.
struct GlobalHeader {
  index_t m = 0;
  index_t n = 0;
  index_t z = 0;

  friend bool operator==(const GlobalHeader&, const GlobalHeader&) = default;
};

/// A rank's local submatrix in CSR. colinds are local to the extent; add
/// n_offset (and m_offset for rows) to recover global coordinates.
struct CsrMatrix {
  index_t m = 0;
  index_t n = 0;
  index_t z = 0;
  index_t m_local = 0;
  index_t n_local = 0;
  index_t z_local = 0;
  index_t m_offset = 0;
  index_t n_offset = 0;
  std::vector<double> vals;
  std::vector<index_t> colinds;
  std::vector<index_t> rowptrs{0};

  PartitionExtent extent() const noexcept { return {m_offset, n_offset, m_local, n_local}; }
  GlobalHeader header() const noexcept { return {m, n, z}; }

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;
};

bool bitwise_equal(const CsrMatrix& a, const CsrMatrix& b) noexcept;

PartitionExtent compute_extent(std::span<const Element> elements) noexcept;

/// Shift global elements into the extent's local frame.
std::vector<Element> localize(std::span<const Element> global, const PartitionExtent& extent);

/// Canonical CSR from local elements (any order). Throws on duplicates and
/// on elements outside the extent.
CsrMatrix coo_to_csr(std::span<const Element> local, const PartitionExtent& extent,
                     const GlobalHeader& header);

/// Expand CSR back to elements in row-major order. With `global` set, the
/// stored offsets are added.
std::vector<Element> csr_to_elements(const CsrMatrix& csr, bool global = false);

/// Throws kInvalidArgument when a CsrMatrix breaks one of its invariants.
void check_csr(const CsrMatrix& csr);

void sort_elements(std::vector<Element>& elements);

}  // namespace abhsf
