#pragma once

#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

#include "abhsf/container.hpp"
#include "abhsf/mapping.hpp"
#include "abhsf/sparse.hpp"

namespace abhsf {

enum class OutputFormat { kCsr, kCoo };

/// Loading configuration: rank count, element mapping, in-memory format.
struct LoadConfig {
  rank_t ranks = 1;
  MappingFn mapping;
  OutputFormat format = OutputFormat::kCsr;
};

struct IoStats {
  std::uint64_t file_opens = 0;
  std::uint64_t bytes_read = 0;
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;

  IoStats& operator+=(const IoStats& o) noexcept {
    file_opens += o.file_opens;
    bytes_read += o.bytes_read;
    accepted += o.accepted;
    rejected += o.rejected;
    return *this;
  }
  friend bool operator==(const IoStats&, const IoStats&) = default;
};

/// A rank's loaded data: CSR local to its extent, or COO in global
/// coordinates sorted by (row, col).
using RankData = std::variant<CsrMatrix, std::vector<Element>>;

struct RankStoreInfo {
  std::uint64_t z_local = 0;
  std::uint64_t file_bytes = 0;
  PartitionExtent extent;
};

/// Splits `matrix` over `mapping.ranks()` ranks, encodes each rank with
/// block size `s`, and writes `<root>/matrix/matrix-<k>.h5spm` plus the
/// manifest. Stale rank files in the directory are removed first; on failure
/// everything written so far is removed.
std::vector<RankStoreInfo> store_file_set(const CooMatrix& matrix, const MappingFn& mapping,
                                          std::uint64_t s, const std::filesystem::path& root);

/// Same-configuration load: rank k reads exactly its own file.
CsrMatrix direct_load(const RankFileSet& files, rank_t k, IoStats& stats);

/// Cross-configuration load: rank k reads every file and keeps the elements
/// with mapping.rank_of(i, j) == k.
RankData cross_config_load(const RankFileSet& files, const LoadConfig& config, rank_t k,
                           IoStats& stats);

enum class LoadPath { kDirect, kAllFiles };

/// kDirect iff the stored manifest records exactly (config.ranks, mapping).
LoadPath select_path(const RankFileSet& files, const LoadConfig& config);

struct RankLoad {
  RankData data;
  IoStats stats;
  double seconds = 0.0;
};

struct SessionResult {
  LoadPath path = LoadPath::kAllFiles;
  std::vector<RankLoad> ranks;
  IoStats total;
  double seconds = 0.0;
};

/// Loads every rank of `config`, at most `jobs` ranks at a time. Results do
/// not depend on `jobs`.
SessionResult run_session(const RankFileSet& files, const LoadConfig& config, unsigned jobs = 1);

/// Global coordinates of a rank's data, sorted.
std::vector<Element> global_elements(const RankData& data);

/// Row nnz histogram of a stored set, decoded without charging any session
/// counter. Used to plan a row-balanced loading mapping.
std::vector<std::uint64_t> stored_row_histogram(const RankFileSet& files);

}  // namespace abhsf
