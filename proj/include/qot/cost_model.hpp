#pragma once

#include <string>

#include "qot/linalg.hpp"

namespace qot {

/// Symmetric, nonnegative distance matrix with zero diagonal on n points.
class ClassicalGeometry {
 public:
  /// Throws InvalidArgument on asymmetry, negative entries or nonzero diagonal;
  /// with `require_metric` also on triangle-inequality violations.
  explicit ClassicalGeometry(RMatrix distances, bool require_metric = false);

  static ClassicalGeometry simplex(int n);  // E_ij = 1 - delta_ij
  static ClassicalGeometry line(int n);     // E_ij = |i - j|

  int size() const noexcept { return static_cast<int>(e_.rows()); }
  const RMatrix& distances() const noexcept { return e_; }
  double operator()(int i, int j) const { return e_(i, j); }

  bool all_positive() const;
  bool is_metric(double tol = 1e-12) const;

 private:
  RMatrix e_;
};

/// PSD operator on C^n (x) C^n annihilating the symmetric subspace.
struct QuantumCostMatrix {
  int n = 0;
  CMatrix matrix;
  double power = 1.0;
  /// Set when some off-diagonal geometry weight is zero, so the kernel is
  /// strictly larger than the symmetric subspace.
  bool degenerate = false;
};

/// SWAP on C^n (x) C^n; built once per n and shared read-only afterwards.
const CMatrix& swap_operator(int n);

/// |psi^-_ij> = (|ij> - |ji>) / sqrt 2 in the row-major composite basis.
CVector singlet(int n, int i, int j);

/// (1 - S) / 2, the projector onto the antisymmetric subspace.
QuantumCostMatrix simplex_cost(int n);

/// sum_{i<j} E_ij |psi^-_ij><psi^-_ij|
QuantumCostMatrix quantize_geometry(const ClassicalGeometry& g);

/// Raises the eigenvalues to `p` (p >= 1) on the same eigenvectors.
QuantumCostMatrix cost_power(const QuantumCostMatrix& c, double p);

/// alpha C + (1 - alpha) diag(C); not a quantum cost matrix for alpha < 1.
CMatrix dephase_cost(const QuantumCostMatrix& c, double alpha);

/// Checks positivity and that the kernel is exactly the symmetric subspace.
/// Throws NotPSD, KernelTooSmall (symmetric vectors not annihilated) or
/// KernelTooLarge (some antisymmetric vector annihilated).
QuantumCostMatrix validate_quantum_cost(const CMatrix& m);

/// Parses a CSV distance matrix (one row per line, comma separated).
ClassicalGeometry parse_geometry_csv(const std::string& text);

/// "simplex", "line" or a path to a CSV file.
ClassicalGeometry geometry_by_name(const std::string& spec, int n);

}  // namespace qot
