#pragma once

#include <cstdint>
#include <vector>

#include "qot/linalg.hpp"

namespace qot {

/// Hermitian, PSD (min eigenvalue >= -1e-10), unit-trace matrix.
/// Only obtainable through validate_state, so every instance is valid.
class DensityMatrix {
 public:
  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const noexcept { return m_; }

  friend DensityMatrix validate_state(const CMatrix& m);

 private:
  explicit DensityMatrix(CMatrix m) : m_(std::move(m)) {}
  CMatrix m_;
};

/// Checks Hermiticity, unit trace and positivity, in that order, and returns
/// the Hermitian part of `m` as a state. Throws NotHermitian, TraceNotOne or
/// NotPSD naming the first violated invariant.
DensityMatrix validate_state(const CMatrix& m);

struct BlochVector {
  int dim = 0;
  RVector components;  // length dim^2 - 1
};

/// Fano coefficients of a bipartite N x N state:
/// rho = (1 + sum a_i L_i (x) 1 + sum b_j 1 (x) L_j + sum R_ij L_i (x) L_j) / N^2.
struct FanoForm {
  int dim = 0;
  RVector a;  // Bloch vector of Tr_B rho
  RVector b;  // Bloch vector of Tr_A rho
  RMatrix r;  // correlation matrix
};

/// A joint state whose partial traces match the two marginals to 1e-8.
class Coupling {
 public:
  Coupling(DensityMatrix marginal_a, DensityMatrix marginal_b, DensityMatrix joint);

  const DensityMatrix& marginal_a() const noexcept { return a_; }
  const DensityMatrix& marginal_b() const noexcept { return b_; }
  const DensityMatrix& joint() const noexcept { return joint_; }

  /// max of the two Frobenius partial-trace residuals
  double marginal_residual() const;

 private:
  DensityMatrix a_;
  DensityMatrix b_;
  DensityMatrix joint_;
};

/// Traceless Hermitian generators with Tr(L_i L_j) = 2 delta_ij.
/// N = 2 returns the Pauli matrices (sigma_1, sigma_2, sigma_3). For N >= 3
/// the N - 1 diagonal generators come first, then the symmetric and
/// antisymmetric off-diagonal pairs for each (j < k).
const std::vector<CMatrix>& generators(int n);

BlochVector to_bloch(const DensityMatrix& rho);
/// Throws NotAState if the vector does not describe a PSD matrix.
DensityMatrix from_bloch(const BlochVector& tau);

FanoForm fano_decompose(const DensityMatrix& joint);
/// Hermitian, unit-trace matrix; positivity is not implied by the form.
CMatrix fano_assemble(const FanoForm& form);

Coupling purification_coupling(const DensityMatrix& rho);
Coupling product_coupling(const DensityMatrix& rho_a, const DensityMatrix& rho_b);

/// rho = G G^dagger / Tr(G G^dagger), G square complex Ginibre.
DensityMatrix random_density(int n, std::uint64_t seed);
DensityMatrix random_pure(int n, std::uint64_t seed);

/// alpha A + (1 - alpha) diag(A). Throws AlphaOutOfRange outside [0, 1].
CMatrix dephase(const CMatrix& m, double alpha);
DensityMatrix dephase_state(const DensityMatrix& rho, double alpha);

DensityMatrix diagonal_state(const std::vector<double>& probabilities);
DensityMatrix mix(const DensityMatrix& x, const DensityMatrix& y, double weight_x);
DensityMatrix tensor(const DensityMatrix& x, const DensityMatrix& y);
DensityMatrix conjugate(const DensityMatrix& rho, const CMatrix& unitary);
DensityMatrix maximally_mixed(int n);
/// (1 + x sigma_1 + y sigma_2 + z sigma_3) / 2
DensityMatrix qubit_state(double x, double y, double z);

bool is_pure(const DensityMatrix& rho, double tol = 1e-10);

}  // namespace qot
