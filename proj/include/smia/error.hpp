#ifndef SMIA_ERROR_HPP_
#define SMIA_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace smia {

enum class ErrorKind {
  MissingFile,
  RaggedRow,
  NonFiniteValue,
  MalformedValue,
  EmptyMatrix,
  IoFailure,
  ValidationError,
  DimMismatch,
  AllRowsRemoved,
  AlphaOutOfRange,
  DegeneratePopulations,
  InvalidParam,
  AllPointsIdentical,
  TooFewSamples,
  DegenerateEmbeddings,
  InputTooLarge,
  NumericalUnderflow,
  NonProbabilityWeights,
  TooLarge,
  UnequalSizes,
  EmptyList,
  TooManyFailedGroups,
  InvalidRange,
  NotPSD,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind so
/// callers (the CLI in particular) can map it onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace smia

#endif  // SMIA_ERROR_HPP_
