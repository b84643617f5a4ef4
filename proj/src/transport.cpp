#include "qot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qot/error.hpp"
#include "qot/tolerances.hpp"

namespace qot {

using linalg::Subsystem;

CouplingProblem::CouplingProblem(DensityMatrix rho_a, DensityMatrix rho_b, CMatrix cost)
    : a_(std::move(rho_a)), b_(std::move(rho_b)), cost_(std::move(cost)) {
  const int n = a_.dim();
  if (b_.dim() != n) throw Error(ErrorKind::DimensionMismatch, "marginals have different dimensions");
  if (cost_.rows() != n * n || cost_.cols() != n * n)
    throw Error(ErrorKind::DimensionMismatch, "cost must have order N^2");
  if (linalg::hermiticity_defect(cost_) > tol::kHermitian * std::max(1.0, cost_.norm()))
    throw Error(ErrorKind::NotHermitian, "cost matrix is not Hermitian");
  cost_ = 0.5 * (cost_ + cost_.adjoint()).eval();
}

Coupling TransportSolution::coupling(const CouplingProblem& problem) const {
  return Coupling(problem.rho_a(), problem.rho_b(), validate_state(joint));
}

int TransportSolution::rank(double tol) const {
  const auto eig = linalg::hermitian_eig(joint);
  return static_cast<int>((eig.values.array() > tol).count());
}

namespace {

// Marginals and cost of a problem on C^na (x) C^nb. The public problem is
// square; the support reduction below produces rectangular ones.
struct Blocks {
  CMatrix cost;
  CMatrix rho_a;
  CMatrix rho_b;
  int na = 0;
  int nb = 0;
};

struct AffineStep {
  CMatrix x;
  CMatrix corr_a;  // multiplier blocks: x = m - corr_a (x) 1 - 1 (x) corr_b
  CMatrix corr_b;
};

void add_kron_identity(CMatrix& out, const CMatrix& a, const CMatrix& b, double sign) {
  const auto na = a.rows();
  const auto nb = b.rows();
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index k = 0; k < na; ++k) {
      auto blk = out.block(i * nb, k * nb, nb, nb);
      if (i == k) blk += sign * b;
      const Complex aik = sign * a(i, k);
      for (Eigen::Index j = 0; j < nb; ++j) blk(j, j) += aik;
    }
}

// Orthogonal projection onto the marginal constraints. With residuals
// (ra, rb) the normal equations nb a + Tr(b) 1 = ra, Tr(a) 1 + na b = rb fix
// only nb Tr a + na Tr b = t; the correction a (x) 1 + 1 (x) b does not depend
// on the split, which is taken as nb Tr a = na Tr b = t / 2.
AffineStep affine_step(const CMatrix& m, const CMatrix& rho_a, const CMatrix& rho_b) {
  const auto na = rho_a.rows();
  const auto nb = rho_b.rows();
  const CMatrix ra = linalg::partial_trace(m, Subsystem::B, static_cast<int>(na), static_cast<int>(nb)) - rho_a;
  const CMatrix rb = linalg::partial_trace(m, Subsystem::A, static_cast<int>(na), static_cast<int>(nb)) - rho_b;
  const Complex t = 0.5 * (ra.trace() + rb.trace());
  const Complex ta = 0.5 * t / static_cast<double>(nb);
  const Complex tb = 0.5 * t / static_cast<double>(na);
  AffineStep step{m, (ra - tb * CMatrix::Identity(na, na)) / static_cast<double>(nb),
                  (rb - ta * CMatrix::Identity(nb, nb)) / static_cast<double>(na)};
  add_kron_identity(step.x, step.corr_a, step.corr_b, -1.0);
  return step;
}

double dual_value(const CMatrix& dual_a, const CMatrix& dual_b, const CMatrix& a, const CMatrix& b) {
  return (dual_a * a).trace().real() + (dual_b * b).trace().real();
}

CMatrix dual_slack(const CMatrix& cost, const CMatrix& dual_a, const CMatrix& dual_b) {
  CMatrix m = cost;
  add_kron_identity(m, dual_a, dual_b, -1.0);
  return 0.5 * (m + m.adjoint());
}

double marginal_residual(const CMatrix& joint, const Blocks& p) {
  return std::max((linalg::partial_trace(joint, Subsystem::B, p.na, p.nb) - p.rho_a).norm(),
                  (linalg::partial_trace(joint, Subsystem::A, p.na, p.nb) - p.rho_b).norm());
}

// Residual balancing keeps mu within this factor of its initial value.
constexpr double kMuRange = 1e6;

// Eigenvalues at or below this are dropped from a marginal's support.
constexpr double kSupport = 1e-11;

// V diag(max(lambda, 0)) V^dagger using only the positive eigenpairs; the
// iterates are low rank near the optimum.
CMatrix positive_part(const linalg::HermitianEigen& eig) {
  const auto d = eig.values.size();
  Eigen::Index first = d;
  while (first > 0 && eig.values[first - 1] > 0.0) --first;
  const auto k = d - first;
  if (k == 0) return CMatrix::Zero(d, d);
  const auto vp = eig.vectors.rightCols(k);
  const CMatrix scaled = vp * eig.values.tail(k).cast<Complex>().asDiagonal();
  CMatrix out = scaled * vp.adjoint();
  return 0.5 * (out + out.adjoint());
}

struct Certificate {
  CMatrix joint;
  double value = 0.0;
  double marginal_residual = 0.0;
  CMatrix dual_a;
  CMatrix dual_b;
  double dual_shift = 0.0;
  double bound = 0.0;
};

// Polished primal point plus identity-shifted feasible duals.
Certificate certify(const CMatrix& z, const AffineStep& step, double mu, const Blocks& p, bool polish) {
  Certificate c;
  CMatrix joint = z;
  if (polish) {
    joint = affine_step(0.5 * (z + z.adjoint()), p.rho_a, p.rho_b).x;
    joint = linalg::psd_project(0.5 * (joint + joint.adjoint()));
    joint /= joint.trace().real();
  }
  c.joint = 0.5 * (joint + joint.adjoint());
  c.value = (p.cost * c.joint).trace().real();
  c.marginal_residual = marginal_residual(c.joint, p);
  // x = y - corr_a (x) 1 - 1 (x) corr_b with y = z - u - C / mu, so at a
  // fixed point C = mu (-u) + (-mu corr_a) (x) 1 + 1 (x) (-mu corr_b).
  c.dual_a = -mu * step.corr_a;
  c.dual_b = -mu * step.corr_b;
  c.dual_a = 0.5 * (c.dual_a + c.dual_a.adjoint()).eval();
  c.dual_b = 0.5 * (c.dual_b + c.dual_b.adjoint()).eval();
  const double lo = linalg::min_eigenvalue(dual_slack(p.cost, c.dual_a, c.dual_b));
  if (lo < 0.0) {
    c.dual_a += lo * CMatrix::Identity(p.na, p.na);
    c.dual_shift = lo;
  }
  c.bound = dual_value(c.dual_a, c.dual_b, p.rho_a, p.rho_b);
  return c;
}

void finish_duals(TransportSolution& sol, const CouplingProblem& pb) {
  const int n = pb.dim();
  const double lo = linalg::min_eigenvalue(dual_slack(pb.cost(), sol.dual_a, sol.dual_b));
  if (lo < 0.0) {
    sol.dual_a += lo * CMatrix::Identity(n, n);
    sol.dual_shift += lo;
  }
  sol.dual_bound = dual_value(sol.dual_a, sol.dual_b, pb.rho_a().matrix(), pb.rho_b().matrix());
  sol.gap = sol.value - sol.dual_bound;
}

// Slack of the reduced certificate that is traded for the penalty weight
// when duals are lifted off a proper subspace.
constexpr double kLiftSlack = 1e-7;

// Pure marginal: the product state is the only coupling. A dual certificate
// within eps of the value: with P the projector on the pure state of A,
// dual_a = -k (1 - P) and dual_b = <psi| C |psi>_A - eps 1 make the slack
// PSD once k exceeds ||C_PQ||^2 / eps + 2 ||C||.
TransportSolution solve_pure(const CouplingProblem& pb, bool pure_a) {
  const int n = pb.dim();
  const CMatrix& cost = pb.cost();
  const double eps = kLiftSlack;
  const auto& pure = pure_a ? pb.rho_a() : pb.rho_b();
  const auto eig = linalg::hermitian_eig(pure.matrix());
  const CVector psi = eig.vectors.col(n - 1);
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix proj = psi * psi.adjoint();

  const CMatrix lift = pure_a ? linalg::kron(psi, id) : linalg::kron(id, psi);  // n^2 x n
  const CMatrix reduced = lift.adjoint() * cost * lift;
  const double cnorm = cost.norm();
  const double k = 2.0 * cnorm * cnorm / eps + 4.0 * cnorm + 1.0;

  TransportSolution sol;
  sol.method = "product";
  sol.joint = linalg::kron(pb.rho_a().matrix(), pb.rho_b().matrix());
  sol.value = sol.raw_value = (cost * sol.joint).trace().real();
  const CMatrix pinned = -k * (id - proj);
  const CMatrix free = 0.5 * (reduced + reduced.adjoint()) - eps * id;
  sol.dual_a = pure_a ? pinned : free;
  sol.dual_b = pure_a ? free : pinned;
  sol.converged = true;
  finish_duals(sol, pb);
  return sol;
}

// Type-II Anderson acceleration on a Hermitian iterate viewed as a real
// vector. Differences of iterates and residuals live in ring buffers with an
// incrementally maintained Gram matrix.
class Anderson {
 public:
  static constexpr double kMaxWeight = 1e4;

  Anderson(int memory, Eigen::Index size)
      : memory_(std::max(memory, 0)), size_(size), dg_(size, memory_), df_(size, memory_), gram_(memory_, memory_) {}

  void reset() {
    count_ = 0;
    next_ = 0;
    have_prev_ = false;
  }

  // Records the pair (v, f(v)); on success writes the extrapolated point.
  bool extrapolate(const CMatrix& v, const CMatrix& f, CMatrix& out) {
    if (memory_ == 0) return false;
    const auto fv = flat(f);
    const RVector g = fv - flat(v);
    if (have_prev_) {
      const int slot = next_;
      dg_.col(slot) = g - prev_g_;
      df_.col(slot) = fv - prev_f_;
      next_ = (next_ + 1) % memory_;
      count_ = std::min(count_ + 1, memory_);
      const RVector row = dg_.leftCols(count_).transpose() * dg_.col(slot);
      gram_.row(slot).head(count_) = row.transpose();
      gram_.col(slot).head(count_) = row;
    }
    prev_g_ = g;
    prev_f_ = fv;
    have_prev_ = true;
    if (count_ == 0) return false;

    RMatrix gram = gram_.topLeftCorner(count_, count_);
    gram.diagonal().array() += 1e-12 * std::max(gram.trace(), 1e-300);
    const RVector gamma = gram.ldlt().solve(dg_.leftCols(count_).transpose() * g);
    // Huge weights come from nearly parallel residual differences and send
    // the iterate far from the fixed-point set; drop the history instead.
    if (!gamma.allFinite() || gamma.lpNorm<Eigen::Infinity>() > kMaxWeight) {
      reset();
      return false;
    }
    out = CMatrix(v.rows(), v.cols());
    Eigen::Map<RVector>(reinterpret_cast<double*>(out.data()), size_) = fv - df_.leftCols(count_) * gamma;
    out = 0.5 * (out + out.adjoint()).eval();
    return true;
  }

 private:
  static Eigen::Map<const RVector> flat(const CMatrix& m) {
    return {reinterpret_cast<const double*>(m.data()), 2 * m.size()};
  }

  int memory_;
  Eigen::Index size_;
  RMatrix dg_;
  RMatrix df_;
  RMatrix gram_;
  int count_ = 0;
  int next_ = 0;
  RVector prev_g_;
  RVector prev_f_;
  bool have_prev_ = false;
};

// ADMM on full-rank marginals; the duals live on the blocks' spaces.
TransportSolution admm(const Blocks& p, const SolverOptions& opt) {
  const int d = p.na * p.nb;
  const CMatrix& cost = p.cost;
  const CMatrix& ra = p.rho_a;
  const CMatrix& rb = p.rho_b;
  const double cost_norm = std::max(cost.norm(), 1e-12);
  const double gap_target = std::min(opt.tol_gap * std::max(1.0, cost.norm()), tol::kGap);
  const double late_gap_target = std::min(10.0 * gap_target, tol::kGap);

  // The iteration is run on v = xh + u, from which z = psd(v) and u = v - z
  // are recovered; one pass is a fixed-point map v -> f(v).
  double mu = opt.mu;
  CMatrix v = linalg::kron(ra, rb);
  CMatrix z = v;
  CMatrix basis = CMatrix::Identity(d, d);
  AffineStep step{z, CMatrix::Zero(p.na, p.na), CMatrix::Zero(p.nb, p.nb)};
  double step_mu = mu;
  Anderson accel(opt.anderson_memory, 2 * d * d);
  CMatrix fallback;  // plain pass output to fall back on if an extrapolation is rejected
  double reference = 0.0;
  bool extrapolated = false;

  TransportSolution sol;
  sol.method = "admm";
  double rel_primal = 1.0;
  double rel_dual = 1.0;
  int it = 0;
  for (it = 1; it <= opt.max_iter; ++it) {
    const auto eig = (it % 500 == 1) ? linalg::hermitian_eig(v) : linalg::hermitian_eig_from(v, basis);
    basis = eig.vectors;
    CMatrix z_next = positive_part(eig);
    CMatrix u = v - z_next;

    if (opt.adapt_interval > 0 && it % opt.adapt_interval == 0) {
      double scale = 1.0;
      if (rel_primal > 10.0 * rel_dual && mu < opt.mu * kMuRange) scale = opt.adapt_factor;
      else if (rel_dual > 10.0 * rel_primal && mu > opt.mu / kMuRange) scale = 1.0 / opt.adapt_factor;
      if (scale != 1.0) {
        mu *= scale;
        u /= scale;
        v = z_next + u;
        accel.reset();
        extrapolated = false;
      }
    }

    step = affine_step(z_next - u - cost / mu, ra, rb);
    step_mu = mu;
    CMatrix f = opt.relaxation * step.x + (1.0 - opt.relaxation) * z_next + u;
    f = 0.5 * (f + f.adjoint()).eval();
    const double residual = (f - v).norm();

    rel_primal = (step.x - z_next).norm() / std::max({step.x.norm(), z_next.norm(), 1e-12});
    rel_dual = mu * (z_next - z).norm() / std::max(mu * u.norm(), cost_norm);
    z = std::move(z_next);
    if (opt.trace_every > 0 && it % opt.trace_every == 0)
      std::fprintf(stderr, "admm it=%d mu=%.3g rp=%.3e rd=%.3e res=%.3e val=%.12f\n", it, mu, rel_primal, rel_dual,
                   residual, (cost * z).trace().real());
    const bool small_residuals = rel_primal <= opt.tol_primal && rel_dual <= opt.tol_dual;
    if (small_residuals || (opt.check_every > 0 && it % opt.check_every == 0)) {
      const auto c = certify(z, step, step_mu, p, opt.polish);
      // Small residuals alone are not enough when the dual is large (nearly
      // pure marginals); the certificate must also close.
      if (small_residuals && c.marginal_residual <= tol::kMarginal && std::abs(c.value - c.bound) <= tol::kGap) {
        sol.converged = true;
        break;
      }
      if (opt.trace_every > 0 && it % opt.trace_every == 0)
        std::fprintf(stderr, "cert it=%d value=%.12f bound=%.12f shift=%.3e marg=%.3e\n", it, c.value, c.bound,
                     c.dual_shift, c.marginal_residual);
      if (c.marginal_residual <= opt.tol_marginal && std::abs(c.value - c.bound) <= gap_target) {
        sol.converged = true;
        break;
      }
      // Nearly singular marginals make the duals large and the gap drifts
      // slowly near the target; late in the budget a looser certificate that
      // still meets the solution tolerances ends the solve.
      if (it >= opt.max_iter / 4 && c.marginal_residual <= tol::kMarginal &&
          std::abs(c.value - c.bound) <= late_gap_target) {
        sol.converged = true;
        break;
      }
    }

    // Safeguard: an extrapolated point must not increase the fixed-point
    // residual much; otherwise resume from the last plain pass.
    if (extrapolated && residual > opt.anderson_safeguard * reference) {
      v = std::move(fallback);
      accel.reset();
      extrapolated = false;
      continue;
    }
    CMatrix next = f;
    extrapolated = accel.extrapolate(v, f, next);
    if (extrapolated) {
      fallback = std::move(f);
      reference = residual;
    }
    v = std::move(next);
  }
  sol.iterations = std::min(it, opt.max_iter);
  sol.primal_residual = rel_primal;
  sol.dual_residual = rel_dual;
  sol.raw_value = (cost * z).trace().real();

  auto c = certify(z, step, step_mu, p, opt.polish);
  sol.joint = std::move(c.joint);
  sol.value = c.value;
  sol.marginal_residual = c.marginal_residual;
  sol.dual_a = std::move(c.dual_a);
  sol.dual_b = std::move(c.dual_b);
  sol.dual_shift = c.dual_shift;
  sol.dual_bound = c.bound;
  sol.gap = sol.value - sol.dual_bound;
  return sol;
}

// Orthonormal basis of the eigenvectors with eigenvalue above kSupport.
CMatrix support_basis(const DensityMatrix& rho) {
  const auto eig = linalg::hermitian_eig(rho.matrix());
  const auto k = (eig.values.array() > kSupport).count();
  return eig.vectors.rightCols(k);
}

// Every coupling lives on supp(rho_a) (x) supp(rho_b). On rank-deficient
// marginals the dual optimum of the full problem is not attained, so ADMM is
// run on the compressed problem and the result is lifted back. Off the
// supports the duals are pinned to -k like in solve_pure.
TransportSolution solve_on_supports(const CouplingProblem& pb, const CMatrix& va, const CMatrix& vb,
                                    const SolverOptions& opt) {
  const int n = pb.dim();
  const CMatrix w = linalg::kron(va, vb);
  Blocks p;
  p.na = static_cast<int>(va.cols());
  p.nb = static_cast<int>(vb.cols());
  p.cost = w.adjoint() * pb.cost() * w;
  p.cost = 0.5 * (p.cost + p.cost.adjoint()).eval();
  p.rho_a = va.adjoint() * pb.rho_a().matrix() * va;
  p.rho_b = vb.adjoint() * pb.rho_b().matrix() * vb;
  p.rho_a /= p.rho_a.trace().real();
  p.rho_b /= p.rho_b.trace().real();

  const auto red = admm(p, opt);
  TransportSolution sol = red;
  sol.method = "admm-support";
  sol.joint = w * red.joint * w.adjoint();
  sol.joint = 0.5 * (sol.joint + sol.joint.adjoint()).eval();
  sol.value = (pb.cost() * sol.joint).trace().real();
  sol.raw_value = red.raw_value;
  const Blocks full{pb.cost(), pb.rho_a().matrix(), pb.rho_b().matrix(), n, n};
  sol.marginal_residual = marginal_residual(sol.joint, full);

  const double eps = kLiftSlack;
  const double scale = pb.cost().norm() + red.dual_a.norm() + red.dual_b.norm();
  const double k = 2.0 * scale * scale / eps + 4.0 * scale + 1.0;
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix pa = va * va.adjoint();
  const CMatrix pb_proj = vb * vb.adjoint();
  sol.dual_a = va * (red.dual_a - eps * CMatrix::Identity(p.na, p.na)) * va.adjoint() - k * (id - pa);
  sol.dual_b = vb * red.dual_b * vb.adjoint() - k * (id - pb_proj);
  sol.dual_a = 0.5 * (sol.dual_a + sol.dual_a.adjoint()).eval();
  sol.dual_b = 0.5 * (sol.dual_b + sol.dual_b.adjoint()).eval();
  sol.dual_shift = 0.0;
  finish_duals(sol, pb);
  return sol;
}

}  // namespace

CMatrix project_marginals(const CMatrix& m, const DensityMatrix& rho_a, const DensityMatrix& rho_b) {
  const int n = rho_a.dim();
  if (rho_b.dim() != n || m.rows() != n * n || m.cols() != n * n)
    throw Error(ErrorKind::DimensionMismatch, "project_marginals: inconsistent dimensions");
  CMatrix h = 0.5 * (m + m.adjoint());
  auto x = affine_step(h, rho_a.matrix(), rho_b.matrix()).x;
  return 0.5 * (x + x.adjoint());
}

TransportSolution solve(const CouplingProblem& pb, const SolverOptions& opt) {
  if (is_pure(pb.rho_a())) return solve_pure(pb, true);
  if (is_pure(pb.rho_b())) return solve_pure(pb, false);

  const int n = pb.dim();
  const CMatrix va = support_basis(pb.rho_a());
  const CMatrix vb = support_basis(pb.rho_b());
  if (va.cols() < n || vb.cols() < n) return solve_on_supports(pb, va, vb, opt);

  const Blocks p{pb.cost(), pb.rho_a().matrix(), pb.rho_b().matrix(), n, n};
  return admm(p, opt);
}

double transport_cost(const DensityMatrix& a, const DensityMatrix& b, const CMatrix& cost,
                      const SolverOptions& options) {
  const auto sol = solve(CouplingProblem(a, b, cost), options);
  if (!sol.converged)
    throw Error(ErrorKind::NoConvergence, "ADMM stopped after " + std::to_string(sol.iterations) + " iterations");
  return sol.value;
}

double swap_fidelity(const DensityMatrix& a, const DensityMatrix& b, const SolverOptions& options) {
  const double t = transport_cost(a, b, simplex_cost(a.dim()).matrix, options);
  return std::clamp(1.0 - 2.0 * t, 0.0, 1.0);
}

double wasserstein(const DensityMatrix& a, const DensityMatrix& b, const QuantumCostMatrix& cost, double p,
                   const SolverOptions& options) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "Wasserstein order must be >= 1");
  const auto powered = cost_power(cost, p);
  const double t = transport_cost(a, b, powered.matrix, options);
  return std::pow(std::max(t, 0.0), 1.0 / p);
}

DualCheck check_dual(const CMatrix& cost, const CMatrix& dual_a, const CMatrix& dual_b, const DensityMatrix& a,
                     const DensityMatrix& b) {
  const int n = a.dim();
  if (b.dim() != n || cost.rows() != n * n || dual_a.rows() != n || dual_b.rows() != n)
    throw Error(ErrorKind::DimensionMismatch, "check_dual: inconsistent dimensions");
  DualCheck out;
  out.min_eigenvalue = linalg::min_eigenvalue(dual_slack(cost, dual_a, dual_b));
  out.feasible = out.min_eigenvalue >= -tol::kDualFeasible;
  out.bound = dual_value(dual_a, dual_b, a.matrix(), b.matrix());
  return out;
}

}  // namespace qot
