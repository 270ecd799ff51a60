#include "abhsf/sparse.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "abhsf/error.hpp"

namespace abhsf {

namespace {

bool same_bits(double a, double b) noexcept {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

std::string coord(index_t row, index_t col) {
  return "(" + std::to_string(row) + ", " + std::to_string(col) + ")";
}

}  // namespace

bool bitwise_equal(const Element& a, const Element& b) noexcept {
  return a.row == b.row && a.col == b.col && same_bits(a.val, b.val);
}

bool bitwise_equal(std::span<const Element> a, std::span<const Element> b) noexcept {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](const Element& x, const Element& y) { return bitwise_equal(x, y); });
}

bool bitwise_equal(const CsrMatrix& a, const CsrMatrix& b) noexcept {
  return a.header() == b.header() && a.extent() == b.extent() && a.z_local == b.z_local &&
         a.colinds == b.colinds && a.rowptrs == b.rowptrs &&
         std::equal(a.vals.begin(), a.vals.end(), b.vals.begin(), b.vals.end(), same_bits);
}

PartitionExtent compute_extent(std::span<const Element> elements) noexcept {
  if (elements.empty()) return {};
  index_t rmin = elements.front().row, rmax = rmin;
  index_t cmin = elements.front().col, cmax = cmin;
  for (const auto& e : elements) {
    rmin = std::min(rmin, e.row);
    rmax = std::max(rmax, e.row);
    cmin = std::min(cmin, e.col);
    cmax = std::max(cmax, e.col);
  }
  return {rmin, cmin, rmax - rmin + 1, cmax - cmin + 1};
}

std::vector<Element> localize(std::span<const Element> global, const PartitionExtent& extent) {
  std::vector<Element> out;
  out.reserve(global.size());
  for (const auto& e : global) {
    if (e.row < extent.m_offset || e.col < extent.n_offset ||
        e.row - extent.m_offset >= extent.m_local || e.col - extent.n_offset >= extent.n_local) {
      fail(ErrorKind::kInvalidArgument, "element " + coord(e.row, e.col) + " outside extent");
    }
    out.push_back({e.row - extent.m_offset, e.col - extent.n_offset, e.val});
  }
  return out;
}

void sort_elements(std::vector<Element>& elements) {
  std::stable_sort(elements.begin(), elements.end(), coord_less);
}

CsrMatrix coo_to_csr(std::span<const Element> local, const PartitionExtent& extent,
                     const GlobalHeader& header) {
  CsrMatrix csr;
  csr.m = header.m;
  csr.n = header.n;
  csr.z = header.z;
  csr.m_local = extent.m_local;
  csr.n_local = extent.n_local;
  csr.m_offset = extent.m_offset;
  csr.n_offset = extent.n_offset;
  csr.z_local = local.size();

  std::vector<Element> sorted(local.begin(), local.end());
  sort_elements(sorted);

  csr.rowptrs.assign(extent.m_local + 1, 0);
  csr.colinds.reserve(sorted.size());
  csr.vals.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& e = sorted[i];
    if (e.row >= extent.m_local || e.col >= extent.n_local) {
      fail(ErrorKind::kInvalidArgument, "element " + coord(e.row, e.col) + " outside extent");
    }
    if (i > 0 && sorted[i - 1].row == e.row && sorted[i - 1].col == e.col) {
      fail(ErrorKind::kDuplicateEntry, "coordinate " + coord(e.row, e.col) + " appears twice");
    }
    ++csr.rowptrs[e.row + 1];
    csr.colinds.push_back(e.col);
    csr.vals.push_back(e.val);
  }
  for (index_t r = 0; r < extent.m_local; ++r) csr.rowptrs[r + 1] += csr.rowptrs[r];
  return csr;
}

std::vector<Element> csr_to_elements(const CsrMatrix& csr, bool global) {
  const index_t row0 = global ? csr.m_offset : 0;
  const index_t col0 = global ? csr.n_offset : 0;
  std::vector<Element> out;
  out.reserve(csr.vals.size());
  for (index_t r = 0; r + 1 < csr.rowptrs.size(); ++r) {
    for (index_t p = csr.rowptrs[r]; p < csr.rowptrs[r + 1]; ++p) {
      out.push_back({r + row0, csr.colinds[p] + col0, csr.vals[p]});
    }
  }
  return out;
}

void check_csr(const CsrMatrix& csr) {
  auto bad = [](const std::string& what) { fail(ErrorKind::kInvalidArgument, "csr: " + what); };
  if (csr.rowptrs.size() != csr.m_local + 1) bad("rowptrs length != m_local + 1");
  if (csr.rowptrs.front() != 0) bad("rowptrs[0] != 0");
  if (csr.rowptrs.back() != csr.z_local) bad("rowptrs[m_local] != z_local");
  if (csr.vals.size() != csr.z_local || csr.colinds.size() != csr.z_local) {
    bad("vals/colinds length != z_local");
  }
  for (index_t r = 0; r < csr.m_local; ++r) {
    if (csr.rowptrs[r] > csr.rowptrs[r + 1]) bad("rowptrs decreasing at row " + std::to_string(r));
    for (index_t p = csr.rowptrs[r]; p < csr.rowptrs[r + 1]; ++p) {
      if (csr.colinds[p] >= csr.n_local) bad("column index out of range");
      if (p > csr.rowptrs[r] && csr.colinds[p - 1] >= csr.colinds[p]) {
        bad("column indexes not strictly increasing in row " + std::to_string(r));
      }
    }
  }
}

}  // namespace abhsf
