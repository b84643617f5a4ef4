#include "qot/cost_model.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "qot/error.hpp"
#include "qot/states.hpp"
#include "qot/tolerances.hpp"

namespace qot {

ClassicalGeometry::ClassicalGeometry(RMatrix distances, bool require_metric) : e_(std::move(distances)) {
  if (e_.rows() != e_.cols() || e_.rows() < 2)
    throw Error(ErrorKind::InvalidArgument, "geometry must be a square matrix on at least 2 points");
  if (!e_.allFinite()) throw Error(ErrorKind::InvalidArgument, "geometry has non-finite entries");
  for (Eigen::Index i = 0; i < e_.rows(); ++i) {
    if (e_(i, i) != 0.0) throw Error(ErrorKind::InvalidArgument, "geometry diagonal must be zero");
    for (Eigen::Index j = 0; j < e_.cols(); ++j) {
      if (e_(i, j) < 0.0) throw Error(ErrorKind::InvalidArgument, "geometry entries must be nonnegative");
      if (std::abs(e_(i, j) - e_(j, i)) > 1e-12 * (1.0 + std::abs(e_(i, j))))
        throw Error(ErrorKind::InvalidArgument, "geometry must be symmetric");
    }
  }
  if (require_metric && !is_metric())
    throw Error(ErrorKind::InvalidArgument, "geometry violates the triangle inequality");
}

ClassicalGeometry ClassicalGeometry::simplex(int n) {
  RMatrix e = RMatrix::Ones(n, n);
  e.diagonal().setZero();
  return ClassicalGeometry(e);
}

ClassicalGeometry ClassicalGeometry::line(int n) {
  RMatrix e(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) e(i, j) = std::abs(i - j);
  return ClassicalGeometry(e);
}

bool ClassicalGeometry::all_positive() const {
  for (Eigen::Index i = 0; i < e_.rows(); ++i)
    for (Eigen::Index j = 0; j < e_.cols(); ++j)
      if (i != j && e_(i, j) <= 0.0) return false;
  return true;
}

bool ClassicalGeometry::is_metric(double tol) const {
  const auto n = e_.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        if (e_(i, k) > e_(i, j) + e_(j, k) + tol) return false;
  return true;
}

const CMatrix& swap_operator(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "swap_operator needs n >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const CMatrix>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    auto s = std::make_unique<CMatrix>(CMatrix::Zero(n * n, n * n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) (*s)(j * n + i, i * n + j) = 1.0;
    slot = std::move(s);
  }
  return *slot;
}

CVector singlet(int n, int i, int j) {
  CVector v = CVector::Zero(n * n);
  v[i * n + j] = M_SQRT1_2;
  v[j * n + i] = -M_SQRT1_2;
  return v;
}

QuantumCostMatrix simplex_cost(int n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "simplex_cost needs n >= 2");
  const CMatrix c = 0.5 * (CMatrix::Identity(n * n, n * n) - swap_operator(n));
  return {n, c, 1.0, false};
}

QuantumCostMatrix quantize_geometry(const ClassicalGeometry& g) {
  const int n = g.size();
  CMatrix c = CMatrix::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (g(i, j) == 0.0) continue;
      const CVector v = singlet(n, i, j);
      c += g(i, j) * (v * v.adjoint());
    }
  return {n, c, 1.0, !g.all_positive()};
}

QuantumCostMatrix cost_power(const QuantumCostMatrix& c, double p) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "cost power must be >= 1");
  if (p == 1.0) return c;
  const auto eig = linalg::hermitian_eig(c.matrix);
  CMatrix m = linalg::spectral_map(eig, [p](double x) { return x > 0.0 ? std::pow(x, p) : 0.0; });
  m = 0.5 * (m + m.adjoint()).eval();
  return {c.n, m, c.power * p, c.degenerate};
}

CMatrix dephase_cost(const QuantumCostMatrix& c, double alpha) { return dephase(c.matrix, alpha); }

QuantumCostMatrix validate_quantum_cost(const CMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "cost matrix must be square");
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m.rows()))));
  if (n * n != m.rows() || n < 2)
    throw Error(ErrorKind::DimensionNotSquare, "cost matrix order must be N^2");
  if (linalg::hermiticity_defect(m) > tol::kHermitian * std::max(1.0, m.norm()))
    throw Error(ErrorKind::NotHermitian, "cost matrix is not Hermitian");
  const CMatrix h = 0.5 * (m + m.adjoint());
  const double scale = std::max(1.0, h.norm());
  const double psd_tol = tol::kPsd * scale;
  if (linalg::min_eigenvalue(h) < -psd_tol) throw Error(ErrorKind::NotPSD, "cost matrix is not PSD");

  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      CVector v = CVector::Zero(n * n);
      v[i * n + j] += M_SQRT1_2;
      v[j * n + i] += M_SQRT1_2;
      v.normalize();
      if ((h * v).norm() > psd_tol)
        throw Error(ErrorKind::KernelTooSmall, "symmetric subspace is not annihilated");
    }

  const int pairs = n * (n - 1) / 2;
  CMatrix basis(n * n, pairs);
  int col = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) basis.col(col++) = singlet(n, i, j);
  const CMatrix gram = basis.adjoint() * h * basis;
  if (linalg::min_eigenvalue(0.5 * (gram + gram.adjoint())) <= psd_tol)
    throw Error(ErrorKind::KernelTooLarge, "an antisymmetric vector is annihilated");
  return {n, h, 1.0, false};
}

ClassicalGeometry parse_geometry_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Parse, "bad geometry cell '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  RMatrix e(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
      throw Error(ErrorKind::Parse, "geometry CSV must be square");
    for (Eigen::Index j = 0; j < n; ++j) e(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return ClassicalGeometry(e);
}

ClassicalGeometry geometry_by_name(const std::string& spec, int n) {
  if (spec == "simplex") return ClassicalGeometry::simplex(n);
  if (spec == "line") return ClassicalGeometry::line(n);
  std::ifstream in(spec);
  if (!in) throw Error(ErrorKind::Parse, "cannot open geometry file " + spec);
  std::stringstream buf;
  buf << in.rdbuf();
  auto g = parse_geometry_csv(buf.str());
  if (g.size() != n)
    throw Error(ErrorKind::DimensionMismatch, "geometry has " + std::to_string(g.size()) + " points, states have " +
                                                  std::to_string(n));
  return g;
}

}  // namespace qot
