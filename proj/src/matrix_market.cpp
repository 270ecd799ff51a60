#include "abhsf/matrix_market.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "abhsf/error.hpp"

namespace abhsf {

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  fail(ErrorKind::kParse, "line " + std::to_string(line) + ": " + what);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

template <class T>
bool parse_number(std::string_view token, T& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

CooMatrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) parse_fail(1, "empty input");
  ++lineno;
  auto banner = split(line);
  if (banner.size() != 5 || banner[0] != "%%MatrixMarket") {
    parse_fail(lineno, "missing %%MatrixMarket banner");
  }
  const std::string object = lower(std::string(banner[1]));
  const std::string format = lower(std::string(banner[2]));
  const std::string field = lower(std::string(banner[3]));
  const std::string symmetry = lower(std::string(banner[4]));
  if (object != "matrix") parse_fail(lineno, "unsupported object '" + object + "'");
  if (format != "coordinate") parse_fail(lineno, "unsupported format '" + format + "'");
  if (field != "real" && field != "integer" && field != "double") {
    parse_fail(lineno, "unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    parse_fail(lineno, "unsupported symmetry '" + symmetry + "'");
  }
  const bool symmetric = symmetry == "symmetric";

  // Size line: first non-comment, non-blank line.
  CooMatrix matrix;
  std::uint64_t declared = 0;
  for (;;) {
    if (!std::getline(in, line)) parse_fail(lineno + 1, "missing size line");
    ++lineno;
    if (line.starts_with('%') || is_blank(line)) continue;
    auto tokens = split(line);
    if (tokens.size() != 3 || !parse_number(tokens[0], matrix.m) ||
        !parse_number(tokens[1], matrix.n) || !parse_number(tokens[2], declared)) {
      parse_fail(lineno, "malformed size line");
    }
    break;
  }
  if (symmetric && matrix.m != matrix.n) parse_fail(lineno, "symmetric matrix must be square");

  matrix.elements.reserve(symmetric ? 2 * declared : declared);
  std::vector<std::size_t> origin;  // source line per element, for diagnostics
  origin.reserve(matrix.elements.capacity());
  std::uint64_t seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.starts_with('%') || is_blank(line)) continue;
    if (seen == declared) parse_fail(lineno, "more entries than declared");
    auto tokens = split(line);
    index_t i = 0, j = 0;
    double v = 0.0;
    if (tokens.size() != 3 || !parse_number(tokens[0], i) || !parse_number(tokens[1], j) ||
        !parse_number(tokens[2], v)) {
      parse_fail(lineno, "malformed entry");
    }
    if (i < 1 || i > matrix.m || j < 1 || j > matrix.n) parse_fail(lineno, "index out of range");
    if (!std::isfinite(v)) parse_fail(lineno, "non-finite value");
    if (v == 0.0) parse_fail(lineno, "explicit zero entry");
    matrix.elements.push_back({i - 1, j - 1, v});
    origin.push_back(lineno);
    if (symmetric && i != j) {
      matrix.elements.push_back({j - 1, i - 1, v});
      origin.push_back(lineno);
    }
    ++seen;
  }
  if (seen != declared) {
    parse_fail(lineno, "expected " + std::to_string(declared) + " entries, found " +
                           std::to_string(seen));
  }

  std::vector<std::size_t> order(matrix.elements.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return coord_less(matrix.elements[a], matrix.elements[b]);
  });
  std::vector<Element> sorted;
  sorted.reserve(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& e = matrix.elements[order[k]];
    if (k > 0) {
      const auto& prev = matrix.elements[order[k - 1]];
      if (prev.row == e.row && prev.col == e.col) {
        parse_fail(std::max(origin[order[k]], origin[order[k - 1]]),
                   "duplicate entry (" + std::to_string(e.row + 1) + ", " +
                       std::to_string(e.col + 1) + ")");
      }
    }
    sorted.push_back(e);
  }
  matrix.elements = std::move(sorted);
  return matrix;
}

CooMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const CooMatrix& matrix) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << matrix.m << ' ' << matrix.n << ' ' << matrix.elements.size() << '\n';
  std::array<char, 64> buf{};
  for (const auto& e : matrix.elements) {
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), e.val);
    out << e.row + 1 << ' ' << e.col + 1 << ' ' << std::string_view(buf.data(), ptr - buf.data())
        << '\n';
  }
}

void write_matrix_market(const std::filesystem::path& path, const CooMatrix& matrix) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kIo, "cannot create " + path.string());
  write_matrix_market(out, matrix);
  if (!out.flush()) fail(ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace abhsf
