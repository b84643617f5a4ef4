#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qot {

enum class ErrorKind {
  NotHermitian,
  NotPSD,
  TraceNotOne,
  NotAState,
  DimensionMismatch,
  DimensionNotSquare,
  NoConvergence,
  ZeroPolynomial,
  AlphaOutOfRange,
  KernelTooSmall,
  KernelTooLarge,
  InvalidArgument,
  Parse,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Library-wide exception; `kind()` names the violated contract.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qot
