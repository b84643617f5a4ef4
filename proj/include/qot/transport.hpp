#pragma once

#include <string>

#include "qot/cost_model.hpp"
#include "qot/states.hpp"

namespace qot {

/// Minimise Tr(cost X) over couplings X of (rho_a, rho_b).
class CouplingProblem {
 public:
  /// Throws DimensionMismatch unless cost has order dim^2, NotHermitian if
  /// the cost is not Hermitian.
  CouplingProblem(DensityMatrix rho_a, DensityMatrix rho_b, CMatrix cost);

  const DensityMatrix& rho_a() const noexcept { return a_; }
  const DensityMatrix& rho_b() const noexcept { return b_; }
  const CMatrix& cost() const noexcept { return cost_; }
  int dim() const noexcept { return a_.dim(); }

 private:
  DensityMatrix a_;
  DensityMatrix b_;
  CMatrix cost_;
};

struct SolverOptions {
  double mu = 1.0;  // initial ADMM penalty
  double tol_primal = 1e-9;
  double tol_dual = 1e-9;
  int max_iter = 200000;
  bool polish = true;
  int adapt_interval = 100;  // residual balancing period
  double adapt_factor = 2.0;
  double relaxation = 1.6;   // over-relaxation of the affine step
  int trace_every = 0;       // > 0: print residuals to stderr every k iterations
  // Certificate stop: every check_every iterations the polished iterate and the
  // shifted duals are evaluated; the solve ends once the gap is below
  // tol_gap * max(1, |C|) with marginal residual below tol_marginal. After
  // max_iter / 4 iterations ten times that gap (at most 1e-6) with marginal
  // residual below 1e-8 is accepted.
  int check_every = 25;
  double tol_gap = 1e-8;
  double tol_marginal = 1e-9;
  int anderson_memory = 40;        // 0 disables extrapolation
  double anderson_safeguard = 1.0;  // max residual growth accepted after a jump
};

struct TransportSolution {
  double value = 0.0;      // Tr(cost * joint), polished
  double raw_value = 0.0;  // Tr(cost * Z) of the last PSD iterate
  CMatrix joint;
  CMatrix dual_a;
  CMatrix dual_b;
  double dual_bound = 0.0;  // Tr(dual_a rho_a) + Tr(dual_b rho_b)
  double gap = 0.0;         // value - dual_bound
  double dual_shift = 0.0;  // identity shift applied to dual_a for feasibility
  double marginal_residual = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string method;  // "admm", "admm-support" (rank-deficient marginal) or "product" (pure marginal)

  /// Typed coupling; throws if the marginal residual exceeds 1e-8.
  Coupling coupling(const CouplingProblem& problem) const;
  /// Number of eigenvalues of `joint` above `tol`.
  int rank(double tol = 1e-7) const;
};

/// Frobenius-nearest point of {X : Tr_B X = rho_a, Tr_A X = rho_b}.
CMatrix project_marginals(const CMatrix& m, const DensityMatrix& rho_a, const DensityMatrix& rho_b);

/// ADMM over the PSD cone and the marginal affine set. Never throws on
/// non-convergence: the best iterate is returned with converged = false.
TransportSolution solve(const CouplingProblem& problem, const SolverOptions& options = {});

/// solve(...).value; throws NoConvergence when the solver did not converge.
double transport_cost(const DensityMatrix& a, const DensityMatrix& b, const CMatrix& cost,
                      const SolverOptions& options = {});

/// 1 - 2 T with the simplex cost, clamped to [0, 1].
double swap_fidelity(const DensityMatrix& a, const DensityMatrix& b, const SolverOptions& options = {});

/// (T with cost^p)^(1/p).
double wasserstein(const DensityMatrix& a, const DensityMatrix& b, const QuantumCostMatrix& cost, double p,
                   const SolverOptions& options = {});

struct DualCheck {
  bool feasible = false;
  double bound = 0.0;
  double min_eigenvalue = 0.0;  // of cost - dual_a (x) 1 - 1 (x) dual_b
};

DualCheck check_dual(const CMatrix& cost, const CMatrix& dual_a, const CMatrix& dual_b, const DensityMatrix& a,
                     const DensityMatrix& b);

}  // namespace qot
