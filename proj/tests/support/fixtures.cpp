#include "fixtures.hpp"

namespace abhsf::test {

Fixture empty_rank_fixture() {
  Fixture f;
  f.file = "empty_rank.h5spm";
  f.payload.m = 4;
  f.payload.n = 4;
  f.payload.block_size = 4;
  return f;
}

Fixture single_coo_fixture() {
  Fixture f;
  f.file = "single_coo.h5spm";
  auto& p = f.payload;
  p.m = 12;
  p.n = 12;
  p.z = 1;
  p.m_local = 1;
  p.n_local = 1;
  p.z_local = 1;
  p.m_offset = 2;
  p.n_offset = 5;
  p.block_size = 8;
  p.blocks = 1;
  p.schemes = {0};
  p.zetas = {1};
  p.brows = {0};
  p.bcols = {0};
  p.coo_lrows = {0};
  p.coo_lcols = {0};
  p.coo_vals = {-1.5};
  f.global = {{2, 5, -1.5}};
  return f;
}

Fixture mixed_fixture() {
  Fixture f;
  f.file = "mixed.h5spm";
  auto& p = f.payload;
  p.m = 10;
  p.n = 10;
  p.z = 10;
  p.m_local = 8;
  p.n_local = 8;
  p.z_local = 10;
  p.m_offset = 1;
  p.n_offset = 2;
  p.block_size = 4;
  p.blocks = 4;
  p.schemes = {0, 1, 2, 3};
  p.zetas = {2, 3, 3, 2};
  p.brows = {0, 0, 1, 1};
  p.bcols = {0, 1, 0, 1};
  // (0,0) COO: local (0,0) and (3,1)
  p.coo_lrows = {0, 3};
  p.coo_lcols = {0, 1};
  p.coo_vals = {1.5, -2.25};
  // (0,1) CSR: in-block row 0 col 3; row 2 cols 0 and 2
  p.csr_rowptrs = {0, 1, 1, 3, 3};
  p.csr_lcolinds = {3, 0, 2};
  p.csr_vals = {0.5, 3.0, 1e-300};
  // (1,0) bitmap: cells 1, 4 and 15 of the 4×4 frame
  p.bitmap_bitmap = {0x12, 0x80};
  p.bitmap_vals = {7.0, -8.0, 0.125};
  // (1,1) dense: corners (0,0) and (3,3)
  p.dense_vals = {4.0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -6.5};

  f.global = {
      {1, 2, 1.5},    {1, 9, 0.5},   {3, 6, 3.0},  {3, 8, 1e-300}, {4, 3, -2.25},
      {5, 3, 7.0},    {6, 2, -8.0},  {5, 6, 4.0},  {8, 5, 0.125},  {8, 9, -6.5},
  };
  sort_elements(f.global);
  return f;
}

std::vector<Fixture> all_fixtures() {
  return {empty_rank_fixture(), single_coo_fixture(), mixed_fixture()};
}

}  // namespace abhsf::test
