#include "qot/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "qot/error.hpp"
#include "qot/tolerances.hpp"

namespace qot {

namespace {

void require_same_dim(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "states have different dimensions");
}

}  // namespace

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a, b);
  const CMatrix root_a = linalg::matrix_sqrt_psd(a.matrix());
  CMatrix inner = root_a * b.matrix() * root_a;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  const auto eig = linalg::hermitian_eig(inner);
  // Rank-deficient products (a pure argument) leave eigenvalues at rounding
  // level, whose square roots would add ~1e-8 to the sum.
  const double noise = 1e-14 * std::max(0.0, eig.values.maxCoeff());
  double sum = 0.0;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    double v = eig.values[k];
    if (v < 0.0 && v >= -tol::kFidelityClip) v = 0.0;
    if (v <= noise) v = 0.0;
    sum += std::sqrt(std::max(v, 0.0));
  }
  return std::clamp(sum * sum, 0.0, 1.0);
}

double root_infidelity(const DensityMatrix& a, const DensityMatrix& b) {
  return std::sqrt(1.0 - fidelity(a, b));
}

double bures_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return std::sqrt(2.0 * (1.0 - std::sqrt(fidelity(a, b))));
}

double bures_angle(const DensityMatrix& a, const DensityMatrix& b) {
  return 2.0 / M_PI * std::acos(std::sqrt(fidelity(a, b)));
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a, b);
  const auto eig = linalg::hermitian_eig(a.matrix() - b.matrix());
  return 0.5 * eig.values.cwiseAbs().sum();
}

double overlap(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a, b);
  return (a.matrix() * b.matrix()).trace().real();
}

}  // namespace qot
