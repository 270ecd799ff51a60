#include "abhsf/payload.hpp"

#include <string>

#include "abhsf/error.hpp"

namespace abhsf {

std::string_view to_string(SchemeTag tag) noexcept {
  switch (tag) {
    case SchemeTag::kCoo: return "COO";
    case SchemeTag::kCsr: return "CSR";
    case SchemeTag::kBitmap: return "BITMAP";
    case SchemeTag::kDense: return "DENSE";
  }
  return "?";
}

std::optional<SchemeTag> scheme_from_byte(std::uint8_t raw) noexcept {
  if (raw >= kSchemeTagCount) return std::nullopt;
  return static_cast<SchemeTag>(raw);
}

std::uint64_t scheme_cost(SchemeTag scheme, std::uint64_t zeta, std::uint64_t s) {
  if (s < 1 || s > kMaxBlockSize) {
    fail(ErrorKind::kInvalidArgument, "block size " + std::to_string(s) + " out of range");
  }
  if (zeta < 1 || zeta > s * s) {
    fail(ErrorKind::kInvalidArgument,
         "zeta " + std::to_string(zeta) + " outside [1, " + std::to_string(s * s) + "]");
  }
  switch (scheme) {
    case SchemeTag::kCoo: return zeta * (2 * kIndexBits + kValueBits);
    case SchemeTag::kCsr: return zeta * (kIndexBits + kValueBits) + (s + 1) * kRowPtrBits;
    case SchemeTag::kBitmap: return s * s + zeta * kValueBits;
    case SchemeTag::kDense: return s * s * kValueBits;
  }
  fail(ErrorKind::kWrongSchemeTag, "tag " + std::to_string(static_cast<int>(scheme)));
}

void validate_payload(const AbhsfPayload& p) {
  auto bad = [](const std::string& what) { fail(ErrorKind::kInvariant, what); };

  const std::uint64_t s = p.block_size;
  if (s < 1 || s > kMaxBlockSize) bad("block_size " + std::to_string(s) + " out of range");
  if (p.m_local > p.m || p.m_offset > p.m - p.m_local) bad("row extent exceeds m");
  if (p.n_local > p.n || p.n_offset > p.n - p.n_local) bad("column extent exceeds n");
  if (p.z_local > p.z) bad("z_local exceeds z");
  if (p.z_local > 0 && (p.m_local == 0 || p.n_local == 0)) bad("nonzeros in an empty extent");
  if (p.blocks > p.z_local) bad("more blocks than local nonzeros");

  for (const auto& [name, size] : {std::pair<const char*, std::size_t>{"schemes", p.schemes.size()},
                                   {"zetas", p.zetas.size()},
                                   {"brows", p.brows.size()},
                                   {"bcols", p.bcols.size()}}) {
    if (size != p.blocks) bad(std::string(name) + " length != blocks");
  }

  const std::uint64_t block_rows = (p.m_local + s - 1) / s;
  const std::uint64_t block_cols = (p.n_local + s - 1) / s;
  std::uint64_t zeta_sum = 0;
  std::uint64_t count[kSchemeTagCount] = {};
  std::uint64_t zeta_by_scheme[kSchemeTagCount] = {};
  for (std::uint64_t k = 0; k < p.blocks; ++k) {
    const auto tag = scheme_from_byte(p.schemes[k]);
    if (!tag) {
      fail(ErrorKind::kWrongSchemeTag, "block " + std::to_string(k) + " has tag " +
                                           std::to_string(static_cast<int>(p.schemes[k])));
    }
    const std::uint64_t zeta = p.zetas[k];
    if (zeta < 1 || zeta > s * s) bad("block " + std::to_string(k) + " zeta out of range");
    if (p.brows[k] >= block_rows || p.bcols[k] >= block_cols) {
      bad("block " + std::to_string(k) + " index outside local submatrix");
    }
    if (k > 0 && (p.brows[k - 1] > p.brows[k] ||
                  (p.brows[k - 1] == p.brows[k] && p.bcols[k - 1] >= p.bcols[k]))) {
      bad("blocks not strictly increasing at block " + std::to_string(k));
    }
    zeta_sum += zeta;
    const auto idx = static_cast<std::size_t>(*tag);
    ++count[idx];
    zeta_by_scheme[idx] += zeta;
  }
  if (zeta_sum != p.z_local) bad("sum(zetas) != z_local");

  auto expect = [&](const char* name, std::size_t got, std::uint64_t want) {
    if (got != want) {
      bad(std::string(name) + " length " + std::to_string(got) + ", expected " +
          std::to_string(want));
    }
  };
  const auto coo = static_cast<std::size_t>(SchemeTag::kCoo);
  const auto csr = static_cast<std::size_t>(SchemeTag::kCsr);
  const auto bmp = static_cast<std::size_t>(SchemeTag::kBitmap);
  const auto dns = static_cast<std::size_t>(SchemeTag::kDense);
  expect("coo_lrows", p.coo_lrows.size(), zeta_by_scheme[coo]);
  expect("coo_lcols", p.coo_lcols.size(), zeta_by_scheme[coo]);
  expect("coo_vals", p.coo_vals.size(), zeta_by_scheme[coo]);
  expect("csr_lcolinds", p.csr_lcolinds.size(), zeta_by_scheme[csr]);
  expect("csr_rowptrs", p.csr_rowptrs.size(), (s + 1) * count[csr]);
  expect("csr_vals", p.csr_vals.size(), zeta_by_scheme[csr]);
  expect("bitmap_bitmap", p.bitmap_bitmap.size(), bitmap_bytes_per_block(s) * count[bmp]);
  expect("bitmap_vals", p.bitmap_vals.size(), zeta_by_scheme[bmp]);
  expect("dense_vals", p.dense_vals.size(), s * s * count[dns]);
}

}  // namespace abhsf
