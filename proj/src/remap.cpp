#include "abhsf/remap.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <regex>
#include <thread>

#include "abhsf/decode.hpp"
#include "abhsf/encode.hpp"
#include "abhsf/error.hpp"

namespace abhsf {

namespace fs = std::filesystem;

namespace {

void remove_stale(const fs::path& dir) {
  static const std::regex pattern(R"(matrix-[0-9]+\.h5spm|manifest\.txt)");
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (std::regex_match(entry.path().filename().string(), pattern)) fs::remove(entry.path());
  }
}

}  // namespace

std::vector<RankStoreInfo> store_file_set(const CooMatrix& matrix, const MappingFn& mapping,
                                          std::uint64_t s, const fs::path& root) {
  const rank_t ranks = mapping.ranks();
  std::vector<std::vector<Element>> per_rank(ranks);
  for (const auto& e : matrix.elements) {
    const rank_t r = mapping.rank_of(e.row, e.col);
    if (r >= ranks) fail(ErrorKind::kMapping, "mapping returned rank " + std::to_string(r));
    per_rank[r].push_back(e);
  }

  const fs::path dir = matrix_directory(root);
  fs::create_directories(dir);
  remove_stale(dir);

  const GlobalHeader header{matrix.m, matrix.n, matrix.nnz()};
  std::vector<RankStoreInfo> info;
  try {
    for (rank_t k = 0; k < ranks; ++k) {
      const auto extent = compute_extent(per_rank[k]);
      const auto local = localize(per_rank[k], extent);
      const auto payload = encode_rank(local, extent, header, s);
      const fs::path path = rank_file_path(root, k);
      write_rank_file(path, payload);
      info.push_back({payload.z_local, fs::file_size(path), extent});
    }
    write_manifest(root, make_manifest(ranks, mapping));
  } catch (...) {
    std::error_code ec;
    remove_stale(dir);
    fs::remove(dir, ec);  // only succeeds if nothing else lives there
    throw;
  }
  return info;
}

CsrMatrix direct_load(const RankFileSet& files, rank_t k, IoStats& stats) {
  if (k >= files.ranks) fail(ErrorKind::kInvalidArgument, "rank " + std::to_string(k) + " has no file");
  IoCounter counter;
  const auto payload = read_rank_file(files.files[k], &counter);
  auto csr = load_rank_file(payload);
  stats.file_opens += counter.file_opens;
  stats.bytes_read += counter.bytes_read;
  stats.accepted += csr.z_local;
  return csr;
}

RankData cross_config_load(const RankFileSet& files, const LoadConfig& config, rank_t k,
                           IoStats& stats) {
  if (config.ranks < 1) fail(ErrorKind::kInvalidArgument, "loading rank count must be >= 1");
  std::vector<Element> kept;
  for (const auto& path : files.files) {
    IoCounter counter;
    const auto payload = read_rank_file(path, &counter);
    stats.file_opens += counter.file_opens;
    stats.bytes_read += counter.bytes_read;
    // Filter as blocks are emitted so a rank never holds another file's
    // decoded elements.
    for_each_block(payload, [&](const BlockDescriptor&, std::span<const Element> block) {
      for (const auto& e : block) {
        const Element g{e.row + payload.m_offset, e.col + payload.n_offset, e.val};
        const rank_t owner = config.mapping.rank_of(g.row, g.col);
        if (owner >= config.ranks) {
          fail(ErrorKind::kMapping, "mapping sent (" + std::to_string(g.row) + ", " +
                                        std::to_string(g.col) + ") to rank " +
                                        std::to_string(owner) + " of " +
                                        std::to_string(config.ranks));
        }
        if (owner == k) {
          kept.push_back(g);
          ++stats.accepted;
        } else {
          ++stats.rejected;
        }
      }
    });
  }
  sort_elements(kept);
  for (std::size_t i = 1; i < kept.size(); ++i) {
    if (kept[i - 1].row == kept[i].row && kept[i - 1].col == kept[i].col) {
      fail(ErrorKind::kDuplicateEntry, "(" + std::to_string(kept[i].row) + ", " +
                                           std::to_string(kept[i].col) +
                                           ") stored in more than one file");
    }
  }
  if (config.format == OutputFormat::kCoo) return kept;
  const auto extent = compute_extent(kept);
  return coo_to_csr(localize(kept, extent), extent, files.header);
}

LoadPath select_path(const RankFileSet& files, const LoadConfig& config) {
  const auto manifest = read_manifest(files.root);
  if (!manifest || manifest->ranks != files.ranks || config.ranks != files.ranks) {
    return LoadPath::kAllFiles;
  }
  return make_manifest(config.ranks, config.mapping) == *manifest ? LoadPath::kDirect
                                                                  : LoadPath::kAllFiles;
}

SessionResult run_session(const RankFileSet& files, const LoadConfig& config, unsigned jobs) {
  const auto session_start = std::chrono::steady_clock::now();
  SessionResult result;
  result.path = select_path(files, config);
  result.ranks.resize(config.ranks);

  auto load_one = [&](rank_t k) {
    auto& slot = result.ranks[k];
    const auto start = std::chrono::steady_clock::now();
    if (result.path == LoadPath::kDirect) {
      auto csr = direct_load(files, k, slot.stats);
      if (config.format == OutputFormat::kCoo) {
        slot.data = csr_to_elements(csr, true);
      } else {
        slot.data = std::move(csr);
      }
    } else {
      slot.data = cross_config_load(files, config, k, slot.stats);
    }
    slot.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const unsigned workers =
      static_cast<unsigned>(std::clamp<rank_t>(jobs == 0 ? 1 : jobs, 1, config.ranks));
  std::vector<std::exception_ptr> errors(config.ranks);
  if (workers == 1) {
    for (rank_t k = 0; k < config.ranks; ++k) load_one(k);
  } else {
    std::atomic<rank_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (rank_t k = next++; k < config.ranks; k = next++) {
          try {
            load_one(k);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (const auto& r : result.ranks) result.total += r.stats;
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - session_start).count();
  return result;
}

std::vector<Element> global_elements(const RankData& data) {
  if (const auto* csr = std::get_if<CsrMatrix>(&data)) return csr_to_elements(*csr, true);
  return std::get<std::vector<Element>>(data);
}

std::vector<std::uint64_t> stored_row_histogram(const RankFileSet& files) {
  std::vector<std::uint64_t> hist(files.header.m, 0);
  for (const auto& path : files.files) {
    const auto payload = read_rank_file(path);
    for_each_block(payload, [&](const BlockDescriptor&, std::span<const Element> block) {
      for (const auto& e : block) ++hist[e.row + payload.m_offset];
    });
  }
  return hist;
}

}  // namespace abhsf
