#include "abhsf/kronecker.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "abhsf/error.hpp"

namespace abhsf {

namespace {

bool mul_overflows(std::uint64_t a, std::uint64_t b, std::uint64_t& out) {
  return __builtin_mul_overflow(a, b, &out);
}

}  // namespace

CooMatrix kronecker_enlarge(const CooMatrix& seed, unsigned power, std::uint64_t max_elements) {
  if (power < 1) fail(ErrorKind::kInvalidArgument, "kronecker power must be >= 1");
  if (seed.elements.empty()) fail(ErrorKind::kInvalidArgument, "kronecker seed is empty");

  std::uint64_t nnz = 1, m = 1, n = 1;
  for (unsigned p = 0; p < power; ++p) {
    if (mul_overflows(nnz, seed.nnz(), nnz) || mul_overflows(m, seed.m, m) ||
        mul_overflows(n, seed.n, n)) {
      fail(ErrorKind::kRefusal, "kronecker power " + std::to_string(power) +
                                    " overflows 64-bit sizes (cap " +
                                    std::to_string(max_elements) + " elements)");
    }
  }
  if (nnz > max_elements) {
    fail(ErrorKind::kRefusal, "kronecker power needs " + std::to_string(nnz) +
                                  " elements, cap is " + std::to_string(max_elements));
  }

  std::vector<Element> seed_sorted = seed.elements;
  sort_elements(seed_sorted);

  // Products come out outer-major; the final sort restores row-major order.
  CooMatrix result{seed.m, seed.n, seed_sorted};
  for (unsigned p = 1; p < power; ++p) {
    CooMatrix next{result.m * seed.m, result.n * seed.n, {}};
    next.elements.reserve(result.nnz() * seed.nnz());
    for (const auto& a : result.elements) {
      for (const auto& b : seed_sorted) {
        const double v = a.val * b.val;
        if (v == 0.0 || !std::isfinite(v)) {
          fail(ErrorKind::kRefusal, "kronecker product value under/overflows binary64");
        }
        next.elements.push_back({a.row * seed.m + b.row, a.col * seed.n + b.col, v});
      }
    }
    result = std::move(next);
  }
  sort_elements(result.elements);
  return result;
}

CooMatrix builtin_seed_demo8() {
  // Unsymmetric, full diagonal plus scattered off-diagonal couplings.
  return CooMatrix{8, 8,
                   {{0, 0, 4.0},  {0, 3, -1.5}, {1, 1, 3.25}, {1, 6, 0.5},  {2, 0, -2.0},
                    {2, 2, 5.0},  {3, 3, 1.75}, {3, 7, -0.25}, {4, 1, 2.5},  {4, 4, 6.0},
                    {5, 2, -3.0}, {5, 5, 2.0},  {5, 7, 1.125}, {6, 4, -0.75}, {6, 6, 7.5},
                    {7, 0, 0.375}, {7, 5, -1.0}, {7, 7, 3.0}}};
}

CooMatrix builtin_seed_demo4() {
  return CooMatrix{4, 4,
                   {{0, 0, 2.0}, {0, 2, -1.0}, {1, 1, 3.0}, {1, 3, 0.5}, {2, 0, -1.5},
                    {2, 2, 4.0}, {2, 3, 1.25}, {3, 1, -0.5}, {3, 2, 2.25}, {3, 3, 1.5}}};
}

}  // namespace abhsf
