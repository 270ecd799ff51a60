#pragma once

#include <cstdint>

#include "abhsf/sparse.hpp"

namespace abhsf {

inline constexpr std::uint64_t kDefaultMaxElements = std::uint64_t{1} << 27;

/// p-fold Kronecker power seed ⊗ seed ⊗ ... ⊗ seed, sorted by (row, col).
/// Refuses (kRefusal) when nnz(seed)^power exceeds `max_elements` or a
/// dimension overflows; the message states the required and allowed counts.
CooMatrix kronecker_enlarge(const CooMatrix& seed, unsigned power,
                            std::uint64_t max_elements = kDefaultMaxElements);

/// Built-in seeds shipped with the library so demos need no downloads.
/// demo8: 8x8, 18 nonzeros. demo4: 4x4, 10 nonzeros.
CooMatrix builtin_seed_demo8();
CooMatrix builtin_seed_demo4();

}  // namespace abhsf
