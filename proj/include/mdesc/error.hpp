#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mdesc {

enum class ErrorKind {
  // metric-core
  NotSquare,
  AsymmetricMatrix,
  NegativeEntry,
  NonzeroDiagonal,
  CoincidentPoints,
  TriangleViolation,
  EigDecompositionFailure,
  NotNegativeType,
  // decomp
  InsufficientSeparatedPairs,
  // embed-single / embed-glue
  KernelNotPSD,
  EmptySet,
  ScaleRangeMismatch,
  NonInjective,
  EnsembleContractViolation,
  // sdp
  Infeasible,
  MaxIterations,
  // cut
  ZeroDemand,
  EmptyOrFullCut,
  TooLarge,
  // plumbing
  InvalidArgument,
  IoError,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mdesc
