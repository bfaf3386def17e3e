#include "smia/error.hpp"

namespace smia {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::RaggedRow: return "RaggedRow";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::MalformedValue: return "MalformedValue";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::AllRowsRemoved: return "AllRowsRemoved";
    case ErrorKind::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorKind::DegeneratePopulations: return "DegeneratePopulations";
    case ErrorKind::InvalidParam: return "InvalidParam";
    case ErrorKind::AllPointsIdentical: return "AllPointsIdentical";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::DegenerateEmbeddings: return "DegenerateEmbeddings";
    case ErrorKind::InputTooLarge: return "InputTooLarge";
    case ErrorKind::NumericalUnderflow: return "NumericalUnderflow";
    case ErrorKind::NonProbabilityWeights: return "NonProbabilityWeights";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::UnequalSizes: return "UnequalSizes";
    case ErrorKind::EmptyList: return "EmptyList";
    case ErrorKind::TooManyFailedGroups: return "TooManyFailedGroups";
    case ErrorKind::InvalidRange: return "InvalidRange";
    case ErrorKind::NotPSD: return "NotPSD";
  }
  return "Unknown";
}

}  // namespace smia
