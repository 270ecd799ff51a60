#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "abhsf/sparse.hpp"

namespace abhsf {

using rank_t = std::uint64_t;

/// Contiguous row chunks: rank r owns rows [boundaries[r], boundaries[r+1]).
struct RowBalanced {
  std::vector<index_t> boundaries;
  friend bool operator==(const RowBalanced&, const RowBalanced&) = default;
};

/// Contiguous column chunks of width ceil(n/q); the last rank absorbs the
/// remainder.
struct ColumnRegular {
  index_t n = 0;
  rank_t q = 0;
  friend bool operator==(const ColumnRegular&, const ColumnRegular&) = default;
};

struct Assignment {
  index_t row = 0;
  index_t col = 0;
  rank_t rank = 0;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Per-coordinate lookup table, sorted by (row, col). Coordinates absent
/// from the table have no owner; looking them up is a kMapping error.
struct Explicit {
  std::vector<Assignment> table;
  rank_t q = 0;
  friend bool operator==(const Explicit&, const Explicit&) = default;
};

/// Element-to-rank assignment M(i, j) over global coordinates.
class MappingFn {
 public:
  using Variant = std::variant<RowBalanced, ColumnRegular, Explicit>;

  /// Validates boundaries: b0 = 0, strictly increasing, at least 2 entries.
  static MappingFn row_balanced(std::vector<index_t> boundaries);
  static MappingFn column_regular(index_t n, rank_t q);
  static MappingFn explicit_table(std::vector<Assignment> table, rank_t q);

  rank_t rank_of(index_t row, index_t col) const;
  rank_t ranks() const noexcept;
  std::string_view name() const noexcept;

  /// Manifest lines after `ranks=`: `mapping=<name>` then the parameters.
  std::string manifest_lines() const;

  const Variant& variant() const noexcept { return v_; }

  friend bool operator==(const MappingFn&, const MappingFn&) = default;

 private:
  explicit MappingFn(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Greedy contiguous split: rank r takes rows until its chunk first reaches
/// (remaining nnz)/(remaining ranks), always leaving one row for each rank
/// still to come. Requires 1 <= q <= rows and a nonzero total.
MappingFn build_row_balanced(std::span<const std::uint64_t> row_nnz, rank_t q);

/// rank(j) = min(j / ceil(n/q), q - 1). Requires 1 <= q <= n.
MappingFn build_column_regular(index_t n, rank_t q);

std::vector<std::uint64_t> row_histogram(const CooMatrix& matrix);

/// 64-bit FNV-1a digest of an explicit table, as 16 hex digits.
std::string explicit_digest(const Explicit& mapping);

/// Storing configuration recorded next to the rank files in
/// `matrix/manifest.txt`.
struct Manifest {
  rank_t ranks = 0;
  std::string mapping_lines;  // everything after the ranks= line

  /// Rebuilds the stored mapping; explicit mappings only keep a digest and
  /// yield nullopt.
  std::optional<MappingFn> mapping() const;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

Manifest make_manifest(rank_t ranks, const MappingFn& mapping);
std::string format_manifest(const Manifest& manifest);
Manifest parse_manifest(std::string_view text);

void write_manifest(const std::filesystem::path& root, const Manifest& manifest);
/// nullopt when the set has no manifest.
std::optional<Manifest> read_manifest(const std::filesystem::path& root);

}  // namespace abhsf
