#include "abhsf/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <bit>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "abhsf/container.hpp"
#include "abhsf/decode.hpp"
#include "abhsf/error.hpp"
#include "abhsf/kronecker.hpp"
#include "abhsf/matrix_market.hpp"
#include "abhsf/remap.hpp"

namespace abhsf::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  // gen
  std::string seed = "builtin:demo8";
  unsigned power = 2;
  std::uint64_t max_nnz = kDefaultMaxElements;
  // store / load / verify
  std::string matrix_path;
  std::string root;
  std::uint64_t ranks = 0;  // 0: default (1 for store, stored P otherwise)
  std::string mapping = "row_balanced";
  std::uint64_t block_size = 64;
  std::uint64_t expect_block_size = 0;  // verify: 0 leaves the stored s unchecked
  std::string format = "csr";
  unsigned jobs = 1;
  std::string out;
  std::string csv;
  std::string dump;
  std::string scenario;
  // inspect
  std::string file;
};

/// Source of the row histogram for a row-balanced mapping; only called when
/// the mapping really has to be built.
using HistogramFn = std::function<std::vector<std::uint64_t>()>;

MappingFn make_mapping(const std::string& name, rank_t q, index_t m, index_t n,
                       const HistogramFn& histogram) {
  if (name == "row_balanced") {
    if (q > m) fail(ErrorKind::kMapping, "cannot spread " + std::to_string(m) + " rows over " +
                                             std::to_string(q) + " ranks");
    return build_row_balanced(histogram(), q);
  }
  if (name == "column_regular") return build_column_regular(n, q);
  fail(ErrorKind::kInvalidArgument, "unknown mapping '" + name + "'");
}

/// The loading mapping for an existing set. A row-balanced mapping with the
/// stored rank count is the stored one (the greedy split is deterministic),
/// so the stored boundaries are reused instead of re-scanning every file.
MappingFn loading_mapping(const Options& opt, const RankFileSet& files, rank_t q) {
  if (opt.mapping == "row_balanced") {
    if (const auto manifest = read_manifest(files.root)) {
      if (auto stored = manifest->mapping(); stored && stored->name() == "row_balanced" &&
                                             stored->ranks() == q) {
        return *stored;
      }
    }
  }
  return make_mapping(opt.mapping, q, files.header.m, files.header.n,
                      [&] { return stored_row_histogram(files); });
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csr") return OutputFormat::kCsr;
  if (name == "coo") return OutputFormat::kCoo;
  fail(ErrorKind::kInvalidArgument, "unknown format '" + name + "'");
}

std::string stored_mapping_name(const RankFileSet& files) {
  const auto manifest = read_manifest(files.root);
  if (!manifest) return "unknown";
  const auto& lines = manifest->mapping_lines;
  const auto eq = lines.find('=');
  return lines.substr(eq + 1, lines.find('\n') - eq - 1);
}

std::string format_value(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

void write_records(const Options& opt, const RankFileSet& files, const LoadConfig& config,
                   const SessionResult& session, const std::string& status, std::ostream& out) {
  std::ofstream file;
  std::ostream* sink = &out;
  if (!opt.csv.empty()) {
    file.open(opt.csv, std::ios::trunc);
    if (!file) fail(ErrorKind::kIo, "cannot create " + opt.csv);
    sink = &file;
  }
  const std::string scenario = opt.scenario.empty()
                                   ? (session.path == LoadPath::kDirect ? "direct" : "all-files")
                                   : opt.scenario;
  const std::string prefix_path = session.path == LoadPath::kDirect ? "direct" : "all-files";
  const std::string store_mapping = stored_mapping_name(files);
  auto row = [&](const std::string& rank, double seconds, const IoStats& s) {
    *sink << scenario << ',' << rank << ',' << files.ranks << ',' << config.ranks << ','
          << store_mapping << ',' << config.mapping.name() << ',' << prefix_path << ','
          << std::fixed << std::setprecision(6) << seconds << std::defaultfloat << ','
          << s.file_opens << ',' << s.bytes_read << ',' << s.accepted << ',' << s.rejected << ','
          << status << '\n';
  };
  *sink << kCsvHeader << '\n';
  for (rank_t k = 0; k < session.ranks.size(); ++k) {
    row(std::to_string(k), session.ranks[k].seconds, session.ranks[k].stats);
  }
  row("total", session.seconds, session.total);
  if (file.is_open() && !file.flush()) fail(ErrorKind::kIo, "write failed for " + opt.csv);
}

void write_dump(const std::string& path, const SessionResult& session) {
  std::ofstream dump(path, std::ios::trunc);
  if (!dump) fail(ErrorKind::kIo, "cannot create " + path);
  dump << "% rank row col value (0-based global coordinates)\n";
  for (rank_t k = 0; k < session.ranks.size(); ++k) {
    for (const auto& e : global_elements(session.ranks[k].data)) {
      dump << k << ' ' << e.row << ' ' << e.col << ' ' << format_value(e.val) << '\n';
    }
  }
  if (!dump.flush()) fail(ErrorKind::kIo, "write failed for " + path);
}

int cmd_gen(const Options& opt, std::ostream& out) {
  CooMatrix seed;
  if (opt.seed == "builtin:demo8") {
    seed = builtin_seed_demo8();
  } else if (opt.seed == "builtin:demo4") {
    seed = builtin_seed_demo4();
  } else {
    seed = read_matrix_market(fs::path(opt.seed));
  }
  const auto matrix = kronecker_enlarge(seed, opt.power, opt.max_nnz);
  write_matrix_market(fs::path(opt.out), matrix);
  out << "wrote " << matrix.m << "x" << matrix.n << " matrix with " << matrix.nnz()
      << " nonzeros to " << opt.out << '\n';
  return kExitOk;
}

int cmd_store(const Options& opt, std::ostream& out) {
  const auto matrix = read_matrix_market(fs::path(opt.matrix_path));
  const rank_t p = opt.ranks == 0 ? 1 : opt.ranks;
  const auto mapping = make_mapping(opt.mapping, p, matrix.m, matrix.n,
                                    [&] { return row_histogram(matrix); });
  const auto info = store_file_set(matrix, mapping, opt.block_size, opt.out);

  std::ofstream file;
  std::ostream* sink = &out;
  if (!opt.csv.empty()) {
    file.open(opt.csv, std::ios::trunc);
    if (!file) fail(ErrorKind::kIo, "cannot create " + opt.csv);
    sink = &file;
  }
  *sink << "rank,z_local,file_bytes,m_offset,n_offset,m_local,n_local\n";
  for (rank_t k = 0; k < info.size(); ++k) {
    const auto& r = info[k];
    *sink << k << ',' << r.z_local << ',' << r.file_bytes << ',' << r.extent.m_offset << ','
          << r.extent.n_offset << ',' << r.extent.m_local << ',' << r.extent.n_local << '\n';
  }
  return kExitOk;
}

int cmd_load(const Options& opt, std::ostream& out) {
  const auto files = open_file_set(opt.root);
  const rank_t q = opt.ranks == 0 ? files.ranks : opt.ranks;
  LoadConfig config{q, loading_mapping(opt, files, q), parse_format(opt.format)};
  const auto session = run_session(files, config, opt.jobs);
  for (const auto& r : session.ranks) {
    if (const auto* csr = std::get_if<CsrMatrix>(&r.data)) check_csr(*csr);
  }
  write_records(opt, files, config, session, "ok", out);
  if (!opt.dump.empty()) write_dump(opt.dump, session);
  return kExitOk;
}

/// Multiset comparison of two sorted element lists, bitwise on values.
std::vector<std::string> compare_elements(const std::vector<Element>& want,
                                          const std::vector<Element>& got) {
  std::vector<std::string> diffs;
  auto show = [](const Element& e) {
    return "(" + std::to_string(e.row) + ", " + std::to_string(e.col) + ", " +
           format_value(e.val) + ")";
  };
  std::size_t i = 0, j = 0;
  while (i < want.size() || j < got.size()) {
    if (j == got.size() || (i < want.size() && coord_less(want[i], got[j]))) {
      diffs.push_back("missing " + show(want[i++]));
    } else if (i == want.size() || coord_less(got[j], want[i])) {
      diffs.push_back("unexpected " + show(got[j++]));
    } else {
      if (!bitwise_equal(want[i], got[j])) {
        diffs.push_back("value at (" + std::to_string(want[i].row) + ", " +
                        std::to_string(want[i].col) + "): expected " + format_value(want[i].val) +
                        ", loaded " + format_value(got[j].val));
      }
      ++i;
      ++j;
    }
  }
  return diffs;
}

int cmd_verify(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto original = read_matrix_market(fs::path(opt.matrix_path));
  const auto files = open_file_set(opt.root);
  const rank_t q = opt.ranks == 0 ? files.ranks : opt.ranks;
  LoadConfig config{q,
                    make_mapping(opt.mapping, q, original.m, original.n,
                                 [&] { return row_histogram(original); }),
                    parse_format(opt.format)};
  const auto session = run_session(files, config, opt.jobs);

  std::vector<std::string> diffs;
  if (files.header.m != original.m || files.header.n != original.n) {
    diffs.push_back("stored dimensions " + std::to_string(files.header.m) + "x" +
                    std::to_string(files.header.n) + ", original " + std::to_string(original.m) +
                    "x" + std::to_string(original.n));
  }
  if (opt.expect_block_size != 0 && files.block_size != opt.expect_block_size) {
    diffs.push_back("stored block size " + std::to_string(files.block_size) + ", expected " +
                    std::to_string(opt.expect_block_size));
  }
  std::vector<Element> loaded;
  for (rank_t k = 0; k < session.ranks.size(); ++k) {
    const auto& data = session.ranks[k].data;
    auto elements = global_elements(data);
    if (const auto* csr = std::get_if<CsrMatrix>(&data)) {
      check_csr(*csr);
      if (csr->header() != files.header) {
        diffs.push_back("rank " + std::to_string(k) + " header differs from the file set");
      }
      // Each rank's extent must be the tight bounding box of what it holds.
      if (csr->extent() != compute_extent(elements)) {
        diffs.push_back("rank " + std::to_string(k) + " extent is not the tight bounding box");
      }
    }
    loaded.insert(loaded.end(), elements.begin(), elements.end());
  }
  sort_elements(loaded);
  auto element_diffs = compare_elements(original.elements, loaded);
  diffs.insert(diffs.end(), element_diffs.begin(), element_diffs.end());

  write_records(opt, files, config, session, diffs.empty() ? "ok" : "mismatch", out);
  if (diffs.empty()) {
    err << "verified " << original.nnz() << " nonzeros over " << q << " ranks\n";
    return kExitOk;
  }
  err << diffs.size() << " discrepancies";
  if (diffs.size() > 10) err << " (first 10 shown)";
  err << '\n';
  for (std::size_t i = 0; i < std::min<std::size_t>(10, diffs.size()); ++i) {
    err << "  " << diffs[i] << '\n';
  }
  return kExitMismatch;
}

int cmd_inspect(const Options& opt, std::ostream& out) {
  std::ifstream in(opt.file, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + opt.file);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  const auto entries = parse_entry_table(bytes);
  const auto payload = parse_payload(bytes);

  out << opt.file << ": " << bytes.size() << " bytes, format version " << kFormatVersion << ", "
      << entries.size() << " entries\n";
  out << std::left << std::setw(16) << "name" << std::setw(11) << "kind" << std::setw(6)
      << "dtype" << std::right << std::setw(12) << "count" << std::setw(12) << "offset" << '\n';
  for (const auto& e : entries) {
    out << std::left << std::setw(16) << e.name << std::setw(11) << to_string(e.kind)
        << std::setw(6) << to_string(e.dtype) << std::right << std::setw(12) << e.count
        << std::setw(12) << e.byte_offset << '\n';
  }
  out << "attributes:\n";
  for_each_entry(payload, [&](const char* name, const auto& field) {
    if constexpr (std::is_same_v<std::remove_cvref_t<decltype(field)>, std::uint64_t>) {
      out << "  " << name << " = " << field << '\n';
    }
  });
  std::uint64_t per_scheme[kSchemeTagCount] = {};
  for (auto tag : payload.schemes) ++per_scheme[tag];
  out << "blocks by scheme:";
  for (std::uint8_t t = 0; t < kSchemeTagCount; ++t) {
    out << ' ' << to_string(static_cast<SchemeTag>(t)) << '=' << per_scheme[t];
  }
  out << '\n';
  return kExitOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kRefusal:
    case ErrorKind::kMapping:
      return kExitUsage;
    default:
      return kExitIo;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Store and load distributed sparse matrices in per-rank ABHSF files"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "Generate a Kronecker power of a seed matrix");
  gen->add_option("--seed", opt.seed, "Matrix Market seed, or builtin:demo8 / builtin:demo4")
      ->capture_default_str();
  gen->add_option("--power", opt.power, "Kronecker power (>= 1)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  gen->add_option("--max-nnz", opt.max_nnz, "Refuse results with more nonzeros")
      ->capture_default_str();
  gen->add_option("--out", opt.out, "Output Matrix Market file")->required();

  auto* store = app.add_subcommand("store", "Write a matrix as one file per rank");
  store->add_option("matrix", opt.matrix_path, "Matrix Market input")->required();
  store->add_option("--ranks", opt.ranks, "Number of storing ranks P")->check(CLI::PositiveNumber);
  store->add_option("--mapping", opt.mapping, "Element-to-rank mapping")
      ->capture_default_str()
      ->check(CLI::IsMember({"row_balanced", "column_regular"}));
  store->add_option("--block-size", opt.block_size, "Block size s")
      ->capture_default_str()
      ->check(CLI::Range(std::uint64_t{1}, kMaxBlockSize));
  store->add_option("--out", opt.out, "Output root; files go to <out>/matrix/")->required();
  store->add_option("--csv", opt.csv, "Write the per-rank table here instead of stdout");

  auto* load = app.add_subcommand("load", "Load a stored set under a configuration");
  load->add_option("root", opt.root, "Root holding matrix/")->required();
  load->add_option("--ranks", opt.ranks, "Number of loading ranks Q (default: stored P)")
      ->check(CLI::PositiveNumber);
  load->add_option("--mapping", opt.mapping, "Loading mapping")
      ->capture_default_str()
      ->check(CLI::IsMember({"row_balanced", "column_regular"}));
  load->add_option("--format", opt.format, "In-memory format")
      ->capture_default_str()
      ->check(CLI::IsMember({"csr", "coo"}));
  load->add_option("--jobs", opt.jobs, "Concurrent rank loads")->capture_default_str();
  load->add_option("--csv", opt.csv, "Write CSV records here instead of stdout");
  load->add_option("--dump", opt.dump, "Dump loaded elements (rank row col value)");
  load->add_option("--scenario", opt.scenario, "Scenario label for the CSV");

  auto* verify = app.add_subcommand("verify", "Load and compare against the original matrix");
  verify->add_option("matrix", opt.matrix_path, "Original Matrix Market file")->required();
  verify->add_option("root", opt.root, "Root holding matrix/")->required();
  verify->add_option("--ranks", opt.ranks, "Number of loading ranks Q (default: stored P)")
      ->check(CLI::PositiveNumber);
  verify->add_option("--mapping", opt.mapping, "Loading mapping")
      ->capture_default_str()
      ->check(CLI::IsMember({"row_balanced", "column_regular"}));
  verify->add_option("--format", opt.format, "In-memory format")
      ->capture_default_str()
      ->check(CLI::IsMember({"csr", "coo"}));
  verify->add_option("--jobs", opt.jobs, "Concurrent rank loads")->capture_default_str();
  verify->add_option("--csv", opt.csv, "Write CSV records here instead of stdout");
  verify->add_option("--scenario", opt.scenario, "Scenario label for the CSV");
  verify->add_option("--block-size", opt.expect_block_size,
                     "Also require the set to be stored with this block size")
      ->check(CLI::Range(std::uint64_t{1}, kMaxBlockSize));

  auto* inspect = app.add_subcommand("inspect", "Print a rank file's entry table and header");
  inspect->add_option("file", opt.file, "A matrix-<k>.h5spm file")->required();

  std::vector<std::string> argv_storage = args.empty() ? std::vector<std::string>{"abhsf"} : args;
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(opt, out);
    if (*store) return cmd_store(opt, out);
    if (*load) return cmd_load(opt, out);
    if (*verify) return cmd_verify(opt, out, err);
    if (*inspect) return cmd_inspect(opt, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace abhsf::cli
