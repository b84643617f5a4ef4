#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qot {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

}  // namespace qot

namespace qot::linalg {

/// Spectral decomposition m = V diag(values) V^dagger, values ascending.
struct HermitianEigen {
  RVector values;
  CMatrix vectors;
};

enum class Subsystem { A, B };

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Throws NotHermitian when ||m - m^dagger||_F > 1e-10 ||m||_F and
/// NoConvergence when the sweep cap is reached.
HermitianEigen hermitian_eig(const CMatrix& m);

/// Same as hermitian_eig, but starts the rotations from the basis `guess`
/// (typically the eigenvectors of a nearby matrix). `guess` must be unitary.
/// The Hermiticity check is skipped: callers pass matrices that are Hermitian
/// by construction. Sweeps stop once the off-diagonal norm is below
/// `rel_off` times the Frobenius norm.
HermitianEigen hermitian_eig_from(const CMatrix& m, const CMatrix& guess, double rel_off = 1e-15);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Partial trace of an operator on C^dim_a (x) C^dim_b, composite index
/// mu = i * dim_b + j. Tracing out A leaves a dim_b matrix, tracing out B a
/// dim_a matrix.
CMatrix partial_trace(const CMatrix& m, Subsystem traced, int dim_a, int dim_b);

/// Frobenius-nearest PSD matrix: negative eigenvalues clipped to zero.
CMatrix psd_project(const CMatrix& m);

/// Principal square root of a PSD matrix; eigenvalues down to -1e-10 are
/// treated as zero, anything more negative throws NotPSD.
CMatrix matrix_sqrt_psd(const CMatrix& m);

/// Rebuilds V diag(f(values)) V^dagger.
template <class F>
CMatrix spectral_map(const HermitianEigen& eig, F&& f) {
  const auto n = eig.values.size();
  CMatrix scaled = eig.vectors;
  for (Eigen::Index k = 0; k < n; ++k) scaled.col(k) *= f(eig.values[k]);
  return scaled * eig.vectors.adjoint();
}

double hermiticity_defect(const CMatrix& m);
double min_eigenvalue(const CMatrix& hermitian);

/// Roots of sum_k coeffs[k] z^k (ascending powers) by Durand-Kerner
/// iteration. Leading zero coefficients are trimmed; trailing zero
/// coefficients contribute exact roots at the origin.
///
/// Every returned root satisfies |p(z)| <= 1e-8 max|coeff|; otherwise
/// NoConvergence is thrown. An all-zero input throws ZeroPolynomial.
std::vector<Complex> poly_roots(std::span<const Complex> coeffs, int max_iter = 200);

/// Roots with ||z| - 1| <= band, from the eigenvalues of the companion
/// matrix followed by Newton polishing. Unlike poly_roots it never has to
/// certify roots far from the circle, whose residuals cannot be resolved in
/// floating point. Kept roots satisfy the poly_roots residual bound, otherwise
/// NoConvergence is thrown.
std::vector<Complex> unit_circle_roots(std::span<const Complex> coeffs, double band);

Complex poly_eval(std::span<const Complex> coeffs, Complex z);

/// Random Haar-distributed unitary built from a seeded Ginibre matrix.
CMatrix random_unitary(int n, unsigned long long seed);

}  // namespace qot::linalg
