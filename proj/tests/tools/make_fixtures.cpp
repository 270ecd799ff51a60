// Rewrites the golden files: make_fixtures <dir>. Only needed after a
// deliberate format change; the golden test pins the current bytes.

#include <filesystem>
#include <iostream>

#include "abhsf/container.hpp"
#include "fixtures.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <dir>\n";
    return 2;
  }
  for (const auto& f : abhsf::test::all_fixtures()) {
    const auto path = std::filesystem::path(argv[1]) / f.file;
    abhsf::write_rank_file(path, f.payload);
    std::cout << "wrote " << path.string() << '\n';
  }
  return 0;
}
