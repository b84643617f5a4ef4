#include "qot/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qot/error.hpp"
#include "qot/random.hpp"
#include "qot/tolerances.hpp"

namespace qot {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CMatrix ginibre(int rows, int cols, Rng& rng) {
  CMatrix g(rows, cols);
  // Row-major fill so the sample does not depend on Eigen's storage order.
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(i, j) = Complex(re, im);
    }
  return g;
}

}  // namespace qot

namespace qot::linalg {

namespace {

constexpr int kMaxSweeps = 100;

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols())
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " needs a square matrix");
}

double off_diagonal_norm2(const CMatrix& a) {
  double s = 0.0;
  const auto n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != j) s += std::norm(a(i, j));
  return s;
}

// In-place cyclic Jacobi on `a` (Hermitian); accumulates rotations into `v`.
void jacobi_sweeps(CMatrix& a, CMatrix& v, double rel_off = 1e-15) {
  const Eigen::Index n = a.rows();
  const double scale2 = std::max(a.squaredNorm(), 1e-300);
  const double stop2 = rel_off * rel_off * scale2;
  const double skip = 1e-18 * std::sqrt(scale2);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm2(a) <= stop2) return;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= skip) continue;
        const Complex w = apq / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const Complex sw = s * w;

        // a <- G^dagger a G with G = [[c, s w], [-s conj(w), c]] on (p, q).
        // Only the columns are rotated; the rows follow by Hermitian symmetry.
        const double wr = sw.real(), wi = sw.imag();
        Complex* colp = a.col(p).data();
        Complex* colq = a.col(q).data();
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double pr = colp[k].real(), pi = colp[k].imag();
          const double qr = colq[k].real(), qi = colq[k].imag();
          // conj(sw) * akq and sw * akp, expanded to avoid the checked complex multiply
          colp[k] = Complex(c * pr - (wr * qr + wi * qi), c * pi - (wr * qi - wi * qr));
          colq[k] = Complex(c * qr + (wr * pr - wi * pi), c * qi + (wr * pi + wi * pr));
          a(p, k) = std::conj(colp[k]);
          a(q, k) = std::conj(colq[k]);
        }
        Complex* vp = v.col(p).data();
        Complex* vq = v.col(q).data();
        for (Eigen::Index k = 0; k < n; ++k) {
          const double pr = vp[k].real(), pi = vp[k].imag();
          const double qr = vq[k].real(), qi = vq[k].imag();
          vp[k] = Complex(c * pr - (wr * qr + wi * qi), c * pi - (wr * qi - wi * qr));
          vq[k] = Complex(c * qr + (wr * pr - wi * pi), c * qi + (wr * pi + wi * pr));
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = app - t * mag;
        a(q, q) = aqq + t * mag;
      }
    }
  }
  if (off_diagonal_norm2(a) > stop2)
    throw Error(ErrorKind::NoConvergence, "Jacobi sweep cap reached");
}

HermitianEigen finish(const CMatrix& a, const CMatrix& v) {
  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });
  HermitianEigen out{RVector(n), CMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

}  // namespace

double hermiticity_defect(const CMatrix& m) { return (m - m.adjoint()).norm(); }

HermitianEigen hermitian_eig(const CMatrix& m) {
  require_square(m, "hermitian_eig");
  if (!m.allFinite()) throw Error(ErrorKind::InvalidArgument, "matrix has non-finite entries");
  if (hermiticity_defect(m) > tol::kHermitian * m.norm())
    throw Error(ErrorKind::NotHermitian, "hermitian_eig input is not Hermitian");
  CMatrix a = 0.5 * (m + m.adjoint());
  CMatrix v = CMatrix::Identity(m.rows(), m.cols());
  jacobi_sweeps(a, v);
  return finish(a, v);
}

HermitianEigen hermitian_eig_from(const CMatrix& m, const CMatrix& guess, double rel_off) {
  require_square(m, "hermitian_eig_from");
  CMatrix a = guess.adjoint() * m * guess;
  a = 0.5 * (a + a.adjoint()).eval();
  CMatrix v = guess;
  jacobi_sweeps(a, v, rel_off);
  return finish(a, v);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix partial_trace(const CMatrix& m, Subsystem traced, int dim_a, int dim_b) {
  if (dim_a <= 0 || dim_b <= 0 || m.rows() != m.cols() || m.rows() != dim_a * dim_b)
    throw Error(ErrorKind::DimensionMismatch, "partial_trace: matrix order is not dim_a * dim_b");
  if (traced == Subsystem::B) {
    CMatrix out = CMatrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int k = 0; k < dim_a; ++k)
        for (int j = 0; j < dim_b; ++j) out(i, k) += m(i * dim_b + j, k * dim_b + j);
    return out;
  }
  CMatrix out = CMatrix::Zero(dim_b, dim_b);
  for (int i = 0; i < dim_a; ++i)
    out += m.block(i * dim_b, i * dim_b, dim_b, dim_b);
  return out;
}

CMatrix psd_project(const CMatrix& m) {
  return spectral_map(hermitian_eig(m), [](double x) { return std::max(x, 0.0); });
}

CMatrix matrix_sqrt_psd(const CMatrix& m) {
  const auto eig = hermitian_eig(m);
  if (eig.values.size() > 0 && eig.values[0] < -tol::kPsd)
    throw Error(ErrorKind::NotPSD, "matrix_sqrt_psd: minimum eigenvalue " + std::to_string(eig.values[0]));
  return spectral_map(eig, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

double min_eigenvalue(const CMatrix& hermitian) {
  const auto eig = hermitian_eig(hermitian);
  return eig.values.size() ? eig.values[0] : 0.0;
}

Complex poly_eval(std::span<const Complex> coeffs, Complex z) {
  Complex acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::vector<Complex> poly_roots(std::span<const Complex> coeffs, int max_iter) {
  double scale = 0.0;
  for (const auto& c : coeffs) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw Error(ErrorKind::InvalidArgument, "poly_roots: non-finite coefficient");
    scale = std::max(scale, std::abs(c));
  }
  if (scale == 0.0) throw Error(ErrorKind::ZeroPolynomial, "all coefficients are zero");

  std::size_t hi = coeffs.size();
  while (hi > 0 && coeffs[hi - 1] == Complex(0.0)) --hi;
  std::size_t lo = 0;
  while (lo < hi && coeffs[lo] == Complex(0.0)) ++lo;

  std::vector<Complex> roots(lo, Complex(0.0));
  const std::span<const Complex> core = coeffs.subspan(lo, hi - lo);
  const int degree = static_cast<int>(core.size()) - 1;
  if (degree <= 0) return roots;

  const Complex lead = core.back();
  std::vector<Complex> monic(core.begin(), core.end());
  for (auto& c : monic) c /= lead;
  double radius = 0.0;
  for (int k = 0; k < degree; ++k) radius = std::max(radius, std::abs(monic[static_cast<std::size_t>(k)]));
  radius += 1.0;

  // Fixed-seed perturbation of the starting circle breaks symmetric stalls.
  Rng rng(0x5EEDULL + static_cast<std::uint64_t>(degree));
  std::vector<Complex> z(static_cast<std::size_t>(degree));
  for (int k = 0; k < degree; ++k) {
    const double angle = 2.0 * M_PI * k / degree + 0.4 + 0.1 * rng.uniform();
    z[static_cast<std::size_t>(k)] = std::polar(radius * (1.0 + 0.05 * rng.uniform()), angle);
  }

  const double target = tol::kRoot * scale;
  auto residual_ok = [&](Complex x) { return std::abs(poly_eval(coeffs, x)) <= target; };

  for (int iter = 0; iter < max_iter; ++iter) {
    double max_step = 0.0;
    for (int i = 0; i < degree; ++i) {
      auto& zi = z[static_cast<std::size_t>(i)];
      Complex denom = 1.0;
      for (int j = 0; j < degree; ++j)
        if (j != i) denom *= zi - z[static_cast<std::size_t>(j)];
      if (denom == Complex(0.0)) denom = 1e-300;
      const Complex step = poly_eval(monic, zi) / denom;
      zi -= step;
      max_step = std::max(max_step, std::abs(step) / std::max(1.0, std::abs(zi)));
    }
    if (max_step <= 1e-15) break;
  }

  // Newton polish on the untrimmed polynomial; keep a step only if it helps.
  std::vector<Complex> deriv;
  for (std::size_t k = 1; k < coeffs.size(); ++k) deriv.push_back(static_cast<double>(k) * coeffs[k]);
  for (auto& zi : z) {
    for (int k = 0; k < 3; ++k) {
      const Complex d = poly_eval(deriv, zi);
      if (d == Complex(0.0)) break;
      const Complex cand = zi - poly_eval(coeffs, zi) / d;
      if (std::abs(poly_eval(coeffs, cand)) < std::abs(poly_eval(coeffs, zi))) zi = cand;
      else break;
    }
    if (!residual_ok(zi)) throw Error(ErrorKind::NoConvergence, "Durand-Kerner did not reach the residual bound");
    roots.push_back(zi);
  }
  return roots;
}

std::vector<Complex> unit_circle_roots(std::span<const Complex> coeffs, double band) {
  double scale = 0.0;
  for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) throw Error(ErrorKind::ZeroPolynomial, "all coefficients are zero");
  std::size_t hi = coeffs.size();
  while (hi > 0 && coeffs[hi - 1] == Complex(0.0)) --hi;
  const int degree = static_cast<int>(hi) - 1;
  if (degree <= 0) return {};

  // companion matrix of the monic polynomial
  CMatrix comp = CMatrix::Zero(degree, degree);
  for (int k = 1; k < degree; ++k) comp(k, k - 1) = 1.0;
  for (int k = 0; k < degree; ++k) comp(k, degree - 1) = -coeffs[static_cast<std::size_t>(k)] / coeffs[hi - 1];
  const Eigen::ComplexEigenSolver<CMatrix> solver(comp, false);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "companion eigenvalues failed");

  std::vector<Complex> deriv;
  for (std::size_t k = 1; k < hi; ++k) deriv.push_back(static_cast<double>(k) * coeffs[k]);
  const double target = tol::kRoot * scale;
  std::vector<Complex> out;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    Complex z = solver.eigenvalues()[i];
    if (std::abs(std::abs(z) - 1.0) > band) continue;
    for (int k = 0; k < 4; ++k) {
      const Complex d = poly_eval(deriv, z);
      if (d == Complex(0.0)) break;
      const Complex cand = z - poly_eval(coeffs, z) / d;
      if (std::abs(poly_eval(coeffs, cand)) < std::abs(poly_eval(coeffs, z))) z = cand;
      else break;
    }
    if (std::abs(std::abs(z) - 1.0) > band) continue;
    if (std::abs(poly_eval(coeffs, z)) > target)
      throw Error(ErrorKind::NoConvergence, "unit-circle root misses the residual bound");
    out.push_back(z);
  }
  return out;
}

CMatrix random_unitary(int n, unsigned long long seed) {
  Rng rng(seed);
  const CMatrix g = ginibre(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    if (std::abs(d) > 0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

}  // namespace qot::linalg
