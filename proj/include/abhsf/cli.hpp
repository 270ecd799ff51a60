#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace abhsf::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitMismatch = 1,
  kExitUsage = 2,
  kExitIo = 3,
};

inline constexpr const char* kCsvHeader =
    "scenario,rank,P,Q,store_mapping,load_mapping,path,wall_seconds,file_opens,bytes_read,"
    "accepted,rejected,status";

/// Runs the command line `args` (args[0] is the program name) and returns
/// the process exit code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace abhsf::cli
