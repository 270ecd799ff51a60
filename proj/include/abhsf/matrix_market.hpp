#pragma once

#include <filesystem>
#include <iosfwd>

#include "abhsf/sparse.hpp"

namespace abhsf {

/// Reads a `%%MatrixMarket matrix coordinate real|integer general|symmetric`
/// stream. Indices become 0-based, symmetric input is expanded, and the result
/// is sorted by (row, col). Explicit zeros and duplicates are rejected with a
/// kParse error naming the offending line.
CooMatrix read_matrix_market(std::istream& in);
CooMatrix read_matrix_market(const std::filesystem::path& path);

/// Writes a general real coordinate file. Values use the shortest decimal
/// form that reads back to the same binary64.
void write_matrix_market(std::ostream& out, const CooMatrix& matrix);
void write_matrix_market(const std::filesystem::path& path, const CooMatrix& matrix);

}  // namespace abhsf
