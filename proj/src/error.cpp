#include "abhsf/error.hpp"

namespace abhsf {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kRefusal: return "refused";
    case ErrorKind::kDuplicateEntry: return "duplicate entry";
    case ErrorKind::kZeroValue: return "zero value";
    case ErrorKind::kWrongSchemeTag: return "wrong scheme tag";
    case ErrorKind::kTruncatedDataset: return "truncated dataset";
    case ErrorKind::kTrailingData: return "trailing data";
    case ErrorKind::kConsistency: return "consistency error";
    case ErrorKind::kZetaMismatch: return "zeta mismatch";
    case ErrorKind::kCorruptBlock: return "corrupt block";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kBadMagic: return "bad magic";
    case ErrorKind::kBadVersion: return "bad version";
    case ErrorKind::kUnknownEntry: return "unknown entry";
    case ErrorKind::kMissingEntry: return "missing entry";
    case ErrorKind::kEntryOrder: return "entry order";
    case ErrorKind::kDtypeMismatch: return "dtype mismatch";
    case ErrorKind::kKindMismatch: return "kind mismatch";
    case ErrorKind::kBounds: return "bounds error";
    case ErrorKind::kInvariant: return "invariant violation";
    case ErrorKind::kRankGap: return "rank gap";
    case ErrorKind::kInconsistentHeaders: return "inconsistent headers";
    case ErrorKind::kTotalMismatch: return "nonzero total mismatch";
    case ErrorKind::kMapping: return "mapping error";
    case ErrorKind::kManifest: return "manifest error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace abhsf
