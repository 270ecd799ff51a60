#include "abhsf/mapping.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "abhsf/container.hpp"
#include "abhsf/error.hpp"

namespace abhsf {

namespace fs = std::filesystem;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::uint64_t parse_u64(std::string_view text, const char* what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    fail(ErrorKind::kManifest, std::string("bad ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

MappingFn MappingFn::row_balanced(std::vector<index_t> boundaries) {
  if (boundaries.size() < 2 || boundaries.front() != 0) {
    fail(ErrorKind::kMapping, "row boundaries must start at 0 and cover at least one rank");
  }
  for (std::size_t r = 1; r < boundaries.size(); ++r) {
    if (boundaries[r] <= boundaries[r - 1]) {
      fail(ErrorKind::kMapping, "row boundaries must be strictly increasing");
    }
  }
  return MappingFn(RowBalanced{std::move(boundaries)});
}

MappingFn MappingFn::column_regular(index_t n, rank_t q) {
  if (q < 1 || q > n) {
    fail(ErrorKind::kMapping, "column mapping needs 1 <= q <= n (q=" + std::to_string(q) +
                                  ", n=" + std::to_string(n) + ")");
  }
  return MappingFn(ColumnRegular{n, q});
}

MappingFn MappingFn::explicit_table(std::vector<Assignment> table, rank_t q) {
  if (q < 1) fail(ErrorKind::kMapping, "explicit mapping needs q >= 1");
  std::sort(table.begin(), table.end(), [](const Assignment& a, const Assignment& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].rank >= q) fail(ErrorKind::kMapping, "explicit table assigns rank >= q");
    if (i > 0 && table[i - 1].row == table[i].row && table[i - 1].col == table[i].col) {
      fail(ErrorKind::kMapping, "explicit table assigns a coordinate twice");
    }
  }
  return MappingFn(Explicit{std::move(table), q});
}

rank_t MappingFn::rank_of(index_t row, index_t col) const {
  return std::visit(
      Overloaded{
          [&](const RowBalanced& m) -> rank_t {
            if (row >= m.boundaries.back()) {
              fail(ErrorKind::kMapping, "row " + std::to_string(row) + " beyond row mapping");
            }
            auto it = std::upper_bound(m.boundaries.begin(), m.boundaries.end(), row);
            return static_cast<rank_t>(it - m.boundaries.begin()) - 1;
          },
          [&](const ColumnRegular& m) -> rank_t {
            if (col >= m.n) {
              fail(ErrorKind::kMapping, "column " + std::to_string(col) + " beyond column mapping");
            }
            const index_t width = (m.n + m.q - 1) / m.q;
            return std::min<rank_t>(col / width, m.q - 1);
          },
          [&](const Explicit& m) -> rank_t {
            auto it = std::lower_bound(m.table.begin(), m.table.end(), Assignment{row, col, 0},
                                       [](const Assignment& a, const Assignment& b) {
                                         return a.row != b.row ? a.row < b.row : a.col < b.col;
                                       });
            if (it == m.table.end() || it->row != row || it->col != col) {
              fail(ErrorKind::kMapping, "no rank assigned to (" + std::to_string(row) + ", " +
                                            std::to_string(col) + ")");
            }
            return it->rank;
          },
      },
      v_);
}

rank_t MappingFn::ranks() const noexcept {
  return std::visit(Overloaded{
                        [](const RowBalanced& m) -> rank_t { return m.boundaries.size() - 1; },
                        [](const ColumnRegular& m) -> rank_t { return m.q; },
                        [](const Explicit& m) -> rank_t { return m.q; },
                    },
                    v_);
}

std::string_view MappingFn::name() const noexcept {
  return std::visit(Overloaded{
                        [](const RowBalanced&) { return std::string_view("row_balanced"); },
                        [](const ColumnRegular&) { return std::string_view("column_regular"); },
                        [](const Explicit&) { return std::string_view("explicit"); },
                    },
                    v_);
}

std::string MappingFn::manifest_lines() const {
  std::ostringstream out;
  out << "mapping=" << name() << '\n';
  std::visit(Overloaded{
                 [&](const RowBalanced& m) {
                   out << "boundaries=";
                   for (std::size_t r = 0; r < m.boundaries.size(); ++r) {
                     out << (r ? "," : "") << m.boundaries[r];
                   }
                   out << '\n';
                 },
                 [&](const ColumnRegular& m) { out << "n=" << m.n << "\nq=" << m.q << '\n'; },
                 [&](const Explicit& m) { out << "digest=" << explicit_digest(m) << '\n'; },
             },
             v_);
  return out.str();
}

MappingFn build_row_balanced(std::span<const std::uint64_t> row_nnz, rank_t q) {
  const index_t m = row_nnz.size();
  if (q < 1 || q > m) {
    fail(ErrorKind::kMapping, "row-balanced mapping needs 1 <= q <= m (q=" + std::to_string(q) +
                                  ", m=" + std::to_string(m) + ")");
  }
  std::uint64_t remaining = 0;
  for (auto c : row_nnz) remaining += c;
  if (remaining == 0) fail(ErrorKind::kMapping, "row-balanced mapping of an empty matrix");

  std::vector<index_t> boundaries{0};
  index_t start = 0;
  for (rank_t r = 0; r + 1 < q; ++r) {
    const rank_t left = q - r;              // ranks still to fill, this one included
    const index_t last_end = m - (left - 1);  // leave one row per later rank
    index_t end = start;
    std::uint64_t chunk = 0;
    // chunk >= remaining / left, compared without division
    while (end < last_end) {
      chunk += row_nnz[end++];
      if (chunk * left >= remaining) break;
    }
    boundaries.push_back(end);
    remaining -= chunk;
    start = end;
  }
  boundaries.push_back(m);
  return MappingFn::row_balanced(std::move(boundaries));
}

MappingFn build_column_regular(index_t n, rank_t q) { return MappingFn::column_regular(n, q); }

std::vector<std::uint64_t> row_histogram(const CooMatrix& matrix) {
  std::vector<std::uint64_t> hist(matrix.m, 0);
  for (const auto& e : matrix.elements) ++hist[e.row];
  return hist;
}

std::string explicit_digest(const Explicit& mapping) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(mapping.q);
  for (const auto& a : mapping.table) {
    mix(a.row);
    mix(a.col);
    mix(a.rank);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<MappingFn> Manifest::mapping() const {
  std::map<std::string, std::string> kv;
  std::istringstream in(mapping_lines);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  const std::string& name = kv["mapping"];
  if (name == "row_balanced") {
    std::vector<index_t> b;
    std::string_view list = kv["boundaries"];
    while (!list.empty()) {
      const auto comma = list.find(',');
      b.push_back(parse_u64(list.substr(0, comma), "boundary"));
      if (comma == std::string_view::npos) break;
      list.remove_prefix(comma + 1);
    }
    return MappingFn::row_balanced(std::move(b));
  }
  if (name == "column_regular") {
    return MappingFn::column_regular(parse_u64(kv["n"], "n"), parse_u64(kv["q"], "q"));
  }
  return std::nullopt;
}

Manifest make_manifest(rank_t ranks, const MappingFn& mapping) {
  return Manifest{ranks, mapping.manifest_lines()};
}

std::string format_manifest(const Manifest& manifest) {
  return "ranks=" + std::to_string(manifest.ranks) + "\n" + manifest.mapping_lines;
}

Manifest parse_manifest(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::kManifest, "line without '=': '" + std::string(line) + "'");
    }
    lines.emplace_back(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
  }
  if (lines.size() < 2 || lines[0].first != "ranks" || lines[1].first != "mapping") {
    fail(ErrorKind::kManifest, "expected 'ranks=' then 'mapping=' lines");
  }
  Manifest m;
  m.ranks = parse_u64(lines[0].second, "ranks");
  const std::string& name = lines[1].second;
  std::vector<std::string> want;
  if (name == "row_balanced") {
    want = {"boundaries"};
  } else if (name == "column_regular") {
    want = {"n", "q"};
  } else if (name == "explicit") {
    want = {"digest"};
  } else {
    fail(ErrorKind::kManifest, "unknown mapping '" + name + "'");
  }
  if (lines.size() != 2 + want.size()) fail(ErrorKind::kManifest, "wrong parameter count");
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (lines[2 + i].first != want[i]) {
      fail(ErrorKind::kManifest, "expected '" + want[i] + "=' for mapping " + name);
    }
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    m.mapping_lines += lines[i].first + "=" + lines[i].second + "\n";
  }
  if (name != "explicit") {
    const auto rebuilt = m.mapping();
    if (rebuilt->ranks() != m.ranks) fail(ErrorKind::kManifest, "mapping rank count != ranks");
  }
  return m;
}

void write_manifest(const fs::path& root, const Manifest& manifest) {
  const fs::path path = matrix_directory(root) / "manifest.txt";
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot create " + path.string());
  out << format_manifest(manifest);
  if (!out.flush()) fail(ErrorKind::kIo, "write failed for " + path.string());
}

std::optional<Manifest> read_manifest(const fs::path& root) {
  const fs::path path = matrix_directory(root) / "manifest.txt";
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

}  // namespace abhsf
