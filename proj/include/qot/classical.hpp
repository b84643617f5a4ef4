#pragma once

#include <vector>

#include "qot/cost_model.hpp"

namespace qot {

/// Nonnegative (down to -1e-12, clipped) entries summing to 1 within 1e-10.
class ProbabilityVector {
 public:
  /// Throws InvalidArgument on negative entries, NotAState on a bad sum.
  explicit ProbabilityVector(std::vector<double> entries);

  int dim() const noexcept { return static_cast<int>(p_.size()); }
  const std::vector<double>& entries() const noexcept { return p_; }
  double operator[](int i) const { return p_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<double> p_;
};

struct TransportPlan {
  double value = 0.0;
  RMatrix plan;  // plan(i, j): mass moved from i to j
  int pivots = 0;
};

/// Transportation simplex: northwest-corner start, stepping-stone pivots,
/// Bland's rule for entering and leaving cells.
TransportPlan transportation_simplex(const std::vector<double>& supply, const std::vector<double>& demand,
                                     const RMatrix& cost);

/// min sum_ij E_ij^order pi_ij over couplings pi of (p, q).
double classical_cost(const ProbabilityVector& p, const ProbabilityVector& q, const ClassicalGeometry& g,
                      double order = 1.0);

/// classical_cost^(1/order).
double classical_wasserstein(const ProbabilityVector& p, const ProbabilityVector& q, const ClassicalGeometry& g,
                             double order);

struct QuantumClassical {
  double tq = 0.0;   // quantum cost of the diagonal embeddings
  double tcl = 0.0;  // classical cost with the distances E
  bool ok = false;   // tq <= tcl + 1e-7
};

/// Embeds p, q as diagonal states. For N = 2 the quantised geometry is
/// E_01 times the simplex cost and the closed form is used; larger N go
/// through the SDP.
QuantumClassical quantum_vs_classical(const ProbabilityVector& p, const ProbabilityVector& q,
                                      const ClassicalGeometry& g);

/// sqrt(|r - s| / 2): the classical order-2 distance between (r, 1-r) and (s, 1-s).
double classical_w2_commuting(double r, double s);

}  // namespace qot
