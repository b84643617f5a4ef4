#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "qot/states.hpp"

// Single-qubit transport with the simplex cost (1 - S) / 2.
//
// States are parametrised as rho(p, theta) = (1 + (2p - 1)(sin theta sigma_1 +
// cos theta sigma_3)) / 2, with rho_a = rho(s, 0) = diag(s, 1 - s) and
// rho_b = rho(r, theta).
namespace qot::qubit {

struct QubitPair {
  double s = 0.5;
  double r = 0.5;
  double theta = 0.0;
};

enum class Branch { Pure, Commuting, Isospectral, Generic };

std::string_view to_string(Branch b) noexcept;

struct Candidate {
  double phi = 0.0;
  double g = 0.0;
};

struct QubitResult {
  double value = 0.0;
  Branch branch = Branch::Generic;
  std::vector<Candidate> candidates;
  /// The stationary points came from the dense phi grid instead of the
  /// polynomial roots (root finder failed or found nothing on the circle).
  bool fallback = false;
};

/// Rotates rho_a onto diag(s, 1 - s) with s >= 1/2 and puts rho_b in the
/// xz-plane. Parallel pairs (and a zero Bloch vector for rho_a) get theta = 0
/// with r possibly below 1/2.
QubitPair canonicalize(const DensityMatrix& rho_a, const DensityMatrix& rho_b);

/// rho(p, theta) as a matrix.
CMatrix rho(double p, double theta);

/// (1/4)(sqrt(1 + (2s-1) cos phi) - sqrt(1 + (2r-1) cos(theta + phi)))^2.
/// Every phi gives a lower bound; the cost is the maximum over phi.
double g(const QubitPair& pair, double phi);

/// Ascending coefficients of the degree-6 polynomial in z = e^{i phi} whose
/// unit-circle roots are the stationary points of g.
std::array<Complex, 7> stationary_polynomial(const QubitPair& pair);

/// Dispatches to the closed forms where they apply, otherwise maximises g
/// over the polynomial roots.
QubitResult cost_exact(const QubitPair& pair);

/// Maximum of g over an n-point grid refined by golden-section search.
Candidate grid_maximum(const QubitPair& pair, int samples = 100000);

/// (1/2)(sqrt((U^dag a U)_11) - sqrt((U^dag b U)_11))^2; never above the cost.
double cost_upper_left(const DensityMatrix& rho_a, const DensityMatrix& rho_b, const CMatrix& unitary);

/// diag(r, 1-r) vs diag(s, 1-s).
double commuting_cost(double r, double s);

/// I/2 vs a state with spectrum {lambda, 1 - lambda}.
double mixed_cost(double lambda);

/// rho(s, 0) vs rho(s, theta).
double isospectral_cost(double s, double theta);

/// rho_+(tau) vs rho_-(tau) = (1 -+ tau . sigma) / 2, as a function of |tau|.
double antipodal_cost(double tau_norm);

/// Cost between diag(r, 1-r) and diag(s, 1-s) under alpha C + (1 - alpha) diag C.
double decohered_commuting_cost(double r, double s, double alpha);

// Competing closed forms for the distance W = sqrt(T) that circulate for the
// isospectral and antipodal cases. They disagree with the values above and
// are kept only so reports can show both numbers.
double isospectral_distance_variant(double lambda, double theta);  // sqrt(1/sqrt2 - sqrt(l(1-l))) |sin(theta/2)|
double antipodal_distance_variant(double tau_norm);                // sqrt(1 - sqrt(1 - t^2))

}  // namespace qot::qubit
