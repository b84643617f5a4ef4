#include "qot/error.hpp"

namespace qot {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::TraceNotOne: return "TraceNotOne";
    case ErrorKind::NotAState: return "NotAState";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DimensionNotSquare: return "DimensionNotSquare";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorKind::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorKind::KernelTooSmall: return "KernelTooSmall";
    case ErrorKind::KernelTooLarge: return "KernelTooLarge";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace qot
