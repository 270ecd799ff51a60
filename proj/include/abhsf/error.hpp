#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace abhsf {

/// Failure categories. Every category has its own diagnostic prefix so that
/// callers (and tests) can tell apart e.g. a dtype mismatch from a truncated
/// dataset without parsing messages.
enum class ErrorKind {
  kInvalidArgument,
  kParse,
  kRefusal,
  kDuplicateEntry,
  kZeroValue,
  // decode
  kWrongSchemeTag,
  kTruncatedDataset,
  kTrailingData,
  kConsistency,
  kZetaMismatch,
  kCorruptBlock,
  // container
  kIo,
  kBadMagic,
  kBadVersion,
  kUnknownEntry,
  kMissingEntry,
  kEntryOrder,
  kDtypeMismatch,
  kKindMismatch,
  kBounds,
  kInvariant,
  kRankGap,
  kInconsistentHeaders,
  kTotalMismatch,
  // remap
  kMapping,
  kManifest,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace abhsf
