#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace divdis {

enum class ErrorCode {
  // prediction / label validation
  RowSumViolation,
  NonFinite,
  NegativeEntry,
  ClassCountMismatch,
  ShapeMismatch,
  LabelOutOfRange,
  EmptyLabels,
  NonIntegerLabel,
  NegativeLabel,
  // pairing
  AnchorNotFound,
  TooFewModels,
  DuplicateModel,
  // argument contracts
  LengthMismatch,
  InvalidArgument,
  TransformMismatch,
  ZeroTruth,
  MissingNotionFit,
  MissingRow,
  MissingLogits,
  EmptyScores,
  MissingSplit,
  MissingLabels,
  // numerical failures
  DegenerateAbscissa,
  TooFewPoints,
  SingularFit,
  Underdetermined,
  // file formats
  BadMagic,
  BadVersion,
  BadFlags,
  TruncatedHeader,
  TruncatedPayload,
  TrailingBytes,
  ShapeOverflow,
  ZeroDimension,
  Schema,
  DanglingPath,
  Io,
  OutputExists,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for failures of the numerics (as opposed to bad input); the CLI maps
/// these to exit status 2.
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace divdis
