#include "divdis/error.hpp"

namespace divdis {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::RowSumViolation: return "RowSumViolation";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::ClassCountMismatch: return "ClassCountMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::EmptyLabels: return "EmptyLabels";
    case ErrorCode::NonIntegerLabel: return "NonIntegerLabel";
    case ErrorCode::NegativeLabel: return "NegativeLabel";
    case ErrorCode::AnchorNotFound: return "AnchorNotFound";
    case ErrorCode::TooFewModels: return "TooFewModels";
    case ErrorCode::DuplicateModel: return "DuplicateModel";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TransformMismatch: return "TransformMismatch";
    case ErrorCode::ZeroTruth: return "ZeroTruth";
    case ErrorCode::MissingNotionFit: return "MissingNotionFit";
    case ErrorCode::MissingRow: return "MissingRow";
    case ErrorCode::MissingLogits: return "MissingLogits";
    case ErrorCode::EmptyScores: return "EmptyScores";
    case ErrorCode::MissingSplit: return "MissingSplit";
    case ErrorCode::MissingLabels: return "MissingLabels";
    case ErrorCode::DegenerateAbscissa: return "DegenerateAbscissa";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::SingularFit: return "SingularFit";
    case ErrorCode::Underdetermined: return "Underdetermined";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::BadVersion: return "BadVersion";
    case ErrorCode::BadFlags: return "BadFlags";
    case ErrorCode::TruncatedHeader: return "TruncatedHeader";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::TrailingBytes: return "TrailingBytes";
    case ErrorCode::ShapeOverflow: return "ShapeOverflow";
    case ErrorCode::ZeroDimension: return "ZeroDimension";
    case ErrorCode::Schema: return "Schema";
    case ErrorCode::DanglingPath: return "DanglingPath";
    case ErrorCode::Io: return "Io";
    case ErrorCode::OutputExists: return "OutputExists";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DegenerateAbscissa:
    case ErrorCode::TooFewPoints:
    case ErrorCode::SingularFit:
    case ErrorCode::Underdetermined:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace divdis
