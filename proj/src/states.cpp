#include "qot/states.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "qot/error.hpp"
#include "qot/random.hpp"
#include "qot/tolerances.hpp"

namespace qot {

using linalg::Subsystem;

DensityMatrix validate_state(const CMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(ErrorKind::DimensionMismatch, "state must be a non-empty square matrix");
  if (!m.allFinite()) throw Error(ErrorKind::InvalidArgument, "state has non-finite entries");
  if (linalg::hermiticity_defect(m) > tol::kHermitian)
    throw Error(ErrorKind::NotHermitian, "state is not Hermitian");
  CMatrix h = 0.5 * (m + m.adjoint());
  const Complex tr = h.trace();
  if (std::abs(tr - 1.0) > tol::kTrace)
    throw Error(ErrorKind::TraceNotOne, "trace is " + std::to_string(tr.real()));
  const double lo = linalg::min_eigenvalue(h);
  if (lo < -tol::kPsd) throw Error(ErrorKind::NotPSD, "minimum eigenvalue " + std::to_string(lo));
  return DensityMatrix(std::move(h));
}

Coupling::Coupling(DensityMatrix marginal_a, DensityMatrix marginal_b, DensityMatrix joint)
    : a_(std::move(marginal_a)), b_(std::move(marginal_b)), joint_(std::move(joint)) {
  if (a_.dim() != b_.dim() || joint_.dim() != a_.dim() * b_.dim())
    throw Error(ErrorKind::DimensionMismatch, "coupling dimensions are inconsistent");
  if (marginal_residual() > tol::kMarginal)
    throw Error(ErrorKind::InvalidArgument,
                "joint state does not reproduce the marginals (residual " + std::to_string(marginal_residual()) + ")");
}

double Coupling::marginal_residual() const {
  const int n = a_.dim();
  const double ra = (linalg::partial_trace(joint_.matrix(), Subsystem::B, n, n) - a_.matrix()).norm();
  const double rb = (linalg::partial_trace(joint_.matrix(), Subsystem::A, n, n) - b_.matrix()).norm();
  return std::max(ra, rb);
}

namespace {

std::vector<CMatrix> build_generators(int n) {
  std::vector<CMatrix> out;
  if (n == 2) {
    CMatrix s1(2, 2), s2(2, 2), s3(2, 2);
    s1 << 0, 1, 1, 0;
    s2 << 0, Complex(0, -1), Complex(0, 1), 0;
    s3 << 1, 0, 0, -1;
    return {s1, s2, s3};
  }
  for (int l = 1; l < n; ++l) {
    CMatrix d = CMatrix::Zero(n, n);
    const double f = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int k = 0; k < l; ++k) d(k, k) = f;
    d(l, l) = -l * f;
    out.push_back(d);
  }
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      CMatrix sym = CMatrix::Zero(n, n);
      sym(j, k) = sym(k, j) = 1.0;
      CMatrix asym = CMatrix::Zero(n, n);
      asym(j, k) = Complex(0, -1);
      asym(k, j) = Complex(0, 1);
      out.push_back(sym);
      out.push_back(asym);
    }
  return out;
}

}  // namespace

const std::vector<CMatrix>& generators(int n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "generators need n >= 2");
  static std::mutex mutex;
  static std::map<int, std::vector<CMatrix>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_generators(n)).first;
  return it->second;
}

BlochVector to_bloch(const DensityMatrix& rho) {
  const int n = rho.dim();
  const auto& gens = generators(n);
  BlochVector out{n, RVector(static_cast<Eigen::Index>(gens.size()))};
  for (std::size_t i = 0; i < gens.size(); ++i)
    out.components[static_cast<Eigen::Index>(i)] = 0.5 * n * (rho.matrix() * gens[i]).trace().real();
  return out;
}

DensityMatrix from_bloch(const BlochVector& tau) {
  const int n = tau.dim;
  const auto& gens = generators(n);
  if (tau.components.size() != static_cast<Eigen::Index>(gens.size()))
    throw Error(ErrorKind::DimensionMismatch, "Bloch vector length must be N^2 - 1");
  CMatrix m = CMatrix::Identity(n, n);
  for (std::size_t i = 0; i < gens.size(); ++i) m += tau.components[static_cast<Eigen::Index>(i)] * gens[i];
  m /= static_cast<double>(n);
  try {
    return validate_state(m);
  } catch (const Error& e) {
    throw Error(ErrorKind::NotAState, e.what());
  }
}

FanoForm fano_decompose(const DensityMatrix& joint) {
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(joint.dim()))));
  if (n * n != joint.dim() || n < 2)
    throw Error(ErrorKind::DimensionNotSquare, "bipartite state order must be N^2");
  const auto& gens = generators(n);
  const auto g = static_cast<Eigen::Index>(gens.size());
  const CMatrix id = CMatrix::Identity(n, n);
  FanoForm out{n, RVector(g), RVector(g), RMatrix(g, g)};
  const CMatrix& rho = joint.matrix();
  const CMatrix rho_a = linalg::partial_trace(rho, Subsystem::B, n, n);
  const CMatrix rho_b = linalg::partial_trace(rho, Subsystem::A, n, n);
  for (Eigen::Index i = 0; i < g; ++i) {
    out.a[i] = 0.5 * n * (rho_a * gens[static_cast<std::size_t>(i)]).trace().real();
    out.b[i] = 0.5 * n * (rho_b * gens[static_cast<std::size_t>(i)]).trace().real();
  }
  for (Eigen::Index i = 0; i < g; ++i)
    for (Eigen::Index j = 0; j < g; ++j) {
      const CMatrix op = linalg::kron(gens[static_cast<std::size_t>(i)], gens[static_cast<std::size_t>(j)]);
      out.r(i, j) = 0.25 * n * n * (rho * op).trace().real();
    }
  return out;
}

CMatrix fano_assemble(const FanoForm& form) {
  const int n = form.dim;
  const auto& gens = generators(n);
  const auto g = static_cast<Eigen::Index>(gens.size());
  if (form.a.size() != g || form.b.size() != g || form.r.rows() != g || form.r.cols() != g)
    throw Error(ErrorKind::DimensionMismatch, "Fano form blocks have the wrong size");
  const CMatrix id = CMatrix::Identity(n, n);
  CMatrix m = CMatrix::Identity(n * n, n * n);
  for (Eigen::Index i = 0; i < g; ++i) {
    const auto& li = gens[static_cast<std::size_t>(i)];
    m += form.a[i] * linalg::kron(li, id) + form.b[i] * linalg::kron(id, li);
    for (Eigen::Index j = 0; j < g; ++j)
      if (form.r(i, j) != 0.0) m += form.r(i, j) * linalg::kron(li, gens[static_cast<std::size_t>(j)]);
  }
  return m / static_cast<double>(n * n);
}

Coupling purification_coupling(const DensityMatrix& rho) {
  const int n = rho.dim();
  const auto eig = linalg::hermitian_eig(rho.matrix());
  CVector psi = CVector::Zero(n * n);
  for (int k = 0; k < n; ++k) {
    const double w = std::sqrt(std::max(eig.values[k], 0.0));
    const CVector v = eig.vectors.col(k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) psi[i * n + j] += w * v[i] * v[j];
  }
  CMatrix joint = psi * psi.adjoint();
  joint /= joint.trace().real();
  return Coupling(rho, rho, validate_state(joint));
}

Coupling product_coupling(const DensityMatrix& rho_a, const DensityMatrix& rho_b) {
  return Coupling(rho_a, rho_b, tensor(rho_a, rho_b));
}

DensityMatrix random_density(int n, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "random_density needs n >= 2");
  Rng rng(seed);
  const CMatrix g = ginibre(n, n, rng);
  CMatrix m = g * g.adjoint();
  m /= m.trace().real();
  return validate_state(0.5 * (m + m.adjoint()));
}

DensityMatrix random_pure(int n, std::uint64_t seed) {
  Rng rng(seed);
  CVector v = ginibre(n, 1, rng).col(0);
  v.normalize();
  return validate_state(v * v.adjoint());
}

CMatrix dephase(const CMatrix& m, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw Error(ErrorKind::AlphaOutOfRange, "alpha must lie in [0, 1]");
  CMatrix out = alpha * m;
  for (Eigen::Index k = 0; k < m.rows(); ++k) out(k, k) = m(k, k);
  return out;
}

DensityMatrix dephase_state(const DensityMatrix& rho, double alpha) {
  return validate_state(dephase(rho.matrix(), alpha));
}

DensityMatrix diagonal_state(const std::vector<double>& probabilities) {
  const auto n = static_cast<Eigen::Index>(probabilities.size());
  CMatrix m = CMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) m(k, k) = probabilities[static_cast<std::size_t>(k)];
  return validate_state(m);
}

DensityMatrix mix(const DensityMatrix& x, const DensityMatrix& y, double weight_x) {
  if (x.dim() != y.dim()) throw Error(ErrorKind::DimensionMismatch, "mix: dimensions differ");
  return validate_state(weight_x * x.matrix() + (1.0 - weight_x) * y.matrix());
}

DensityMatrix tensor(const DensityMatrix& x, const DensityMatrix& y) {
  return validate_state(linalg::kron(x.matrix(), y.matrix()));
}

DensityMatrix conjugate(const DensityMatrix& rho, const CMatrix& unitary) {
  const CMatrix m = unitary * rho.matrix() * unitary.adjoint();
  return validate_state(0.5 * (m + m.adjoint()));
}

DensityMatrix maximally_mixed(int n) {
  return validate_state(CMatrix::Identity(n, n) / static_cast<double>(n));
}

DensityMatrix qubit_state(double x, double y, double z) {
  CMatrix m(2, 2);
  m << 1.0 + z, Complex(x, -y), Complex(x, y), 1.0 - z;
  return validate_state(0.5 * m);
}

bool is_pure(const DensityMatrix& rho, double tol) {
  const auto eig = linalg::hermitian_eig(rho.matrix());
  return eig.values[eig.values.size() - 1] >= 1.0 - tol;
}

}  // namespace qot
