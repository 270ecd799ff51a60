#pragma once
// Payloads pinned by the golden files in tests/fixtures/. Each is a valid
// single-rank file set on its own (z = z_local).

#include <string>
#include <vector>

#include "abhsf/payload.hpp"

namespace abhsf::test {

struct Fixture {
  std::string file;  // name under tests/fixtures/
  AbhsfPayload payload;
  std::vector<Element> global;  // the elements the payload holds, global, sorted
};

/// 4×4 matrix without nonzeros.
Fixture empty_rank_fixture();
/// One nonzero at global (2, 5) of a 12×12 matrix, s = 8 (COO block).
Fixture single_coo_fixture();
/// 10×10 matrix, s = 4, one block of each scheme over an 8×8 extent at (1, 2).
Fixture mixed_fixture();

std::vector<Fixture> all_fixtures();

}  // namespace abhsf::test
