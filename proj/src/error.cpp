#include "mdesc/error.hpp"

namespace mdesc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::AsymmetricMatrix: return "AsymmetricMatrix";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::TriangleViolation: return "TriangleViolation";
    case ErrorKind::EigDecompositionFailure: return "EigDecompositionFailure";
    case ErrorKind::NotNegativeType: return "NotNegativeType";
    case ErrorKind::InsufficientSeparatedPairs: return "InsufficientSeparatedPairs";
    case ErrorKind::KernelNotPSD: return "KernelNotPSD";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::ScaleRangeMismatch: return "ScaleRangeMismatch";
    case ErrorKind::NonInjective: return "NonInjective";
    case ErrorKind::EnsembleContractViolation: return "EnsembleContractViolation";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::ZeroDemand: return "ZeroDemand";
    case ErrorKind::EmptyOrFullCut: return "EmptyOrFullCut";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace mdesc
