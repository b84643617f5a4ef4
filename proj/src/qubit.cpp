#include "qot/qubit.hpp"

#include <algorithm>
#include <cmath>

#include "qot/error.hpp"
#include "qot/tolerances.hpp"

namespace qot::qubit {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kPureTol = 1e-12;
constexpr double kAngleTol = 1e-9;
constexpr double kSpectrumTol = 1e-12;

void check_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::InvalidArgument, std::string(name) + " must lie in [0, 1]");
}

double wrap(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

// distance from theta to target on the circle
double angle_gap(double theta, double target) {
  const double d = std::abs(wrap(theta - target));
  return std::min(d, kTwoPi - d);
}

using Poly = std::vector<Complex>;

Poly multiply(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, Complex(0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

double sqrt0(double x) { return std::sqrt(std::max(0.0, x)); }

double pure_cost(const QubitPair& p) { return 0.25 * (1.0 - (2.0 * p.s - 1.0) * (2.0 * p.r - 1.0) * std::cos(p.theta)); }

// Stationary points from the polynomial roots; empty when none lands on the
// unit circle. Throws NoConvergence from the root finder.
std::vector<Candidate> root_candidates(const QubitPair& pair) {
  auto c = stationary_polynomial(pair);
  double scale = 0.0;
  for (const auto& x : c) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return {};
  // near-vanishing top coefficients would send roots to infinity
  std::size_t hi = c.size();
  while (hi > 1 && std::abs(c[hi - 1]) <= 1e-14 * scale) --hi;
  const std::vector<Complex> trimmed(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(hi));
  std::vector<Complex> roots;
  try {
    roots = linalg::poly_roots(trimmed);
  } catch (const Error& e) {
    // typically s or r close to 1/2: one root near 0, one near infinity
    if (e.kind() != ErrorKind::NoConvergence) throw;
    roots = linalg::unit_circle_roots(trimmed, tol::kUnitCircle);
  }
  std::vector<Candidate> out;
  for (const Complex& z : roots) {
    if (std::abs(std::abs(z) - 1.0) > tol::kUnitCircle) continue;
    const double phi = wrap(std::arg(z));
    out.push_back({phi, g(pair, phi)});
  }
  return out;
}

double best(const std::vector<Candidate>& cs) {
  double v = 0.0;
  for (const auto& c : cs) v = std::max(v, c.g);
  return v;
}

QubitResult generic(const QubitPair& pair) {
  QubitResult res;
  res.branch = Branch::Generic;
  try {
    res.candidates = root_candidates(pair);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoConvergence) throw;
    res.candidates.clear();
  }
  if (res.candidates.empty()) {
    res.candidates = {grid_maximum(pair)};
    res.fallback = true;
  }
  res.value = best(res.candidates);
  return res;
}

// phi = 0, pi and the interior stationary point of the diagonal problem
std::vector<Candidate> commuting_candidates(const QubitPair& diag) {
  std::vector<Candidate> out{{0.0, g(diag, 0.0)}, {M_PI, g(diag, M_PI)}};
  const double den = (2.0 * diag.r - 1.0) * (2.0 * diag.s - 1.0);
  if (den != 0.0) {
    const double c0 = 2.0 * (1.0 - diag.r - diag.s) / den;
    if (std::abs(c0) <= 1.0) {
      const double phi0 = std::acos(c0);
      out.push_back({phi0, g(diag, phi0)});
    }
  }
  return out;
}

// Stationary points of g for rho(s, 0) vs rho(s, theta): the symmetric pair
// phi = -theta/2 (+ pi) and the roots of c y^2 + 2 cos(theta/2) y + c cos^2(theta/2)
// with y = cos(phi + theta/2), c = 2s - 1.
std::vector<Candidate> isospectral_candidates(const QubitPair& pair, double s, double theta) {
  std::vector<Candidate> out;
  auto add = [&](double phi) {
    phi = wrap(phi);
    out.push_back({phi, g(pair, phi)});
  };
  add(-0.5 * theta);
  add(-0.5 * theta + M_PI);
  const double c = 2.0 * s - 1.0;
  if (std::abs(c) > 1e-14) {
    const double h = std::cos(0.5 * theta);
    const double root = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (double y : {h * (-1.0 + root) / c, h * (-1.0 - root) / c}) {
      if (std::abs(y) > 1.0) continue;
      const double a = std::acos(y);
      add(-0.5 * theta + a);
      add(-0.5 * theta - a);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Branch b) noexcept {
  switch (b) {
    case Branch::Pure: return "pure";
    case Branch::Commuting: return "commuting";
    case Branch::Isospectral: return "isospectral";
    case Branch::Generic: return "generic";
  }
  return "unknown";
}

QubitPair canonicalize(const DensityMatrix& rho_a, const DensityMatrix& rho_b) {
  if (rho_a.dim() != 2 || rho_b.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "qubit states required");
  const RVector ta = to_bloch(rho_a).components;
  const RVector tb = to_bloch(rho_b).components;
  const double na = ta.norm();
  const double nb = tb.norm();
  QubitPair p;
  if (na <= 1e-14) {
    p.s = 0.5;
    p.r = std::clamp(0.5 * (1.0 + nb), 0.0, 1.0);
    return p;
  }
  p.s = std::clamp(0.5 * (1.0 + na), 0.0, 1.0);
  if (nb <= 1e-14) {
    p.r = 0.5;
    return p;
  }
  const Eigen::Vector3d a = ta.head<3>() / na;
  const Eigen::Vector3d b = tb.head<3>();
  const double along = a.dot(b);
  const double across = a.cross(b).norm();
  if (across <= 1e-12 * nb) {
    p.r = std::clamp(0.5 * (1.0 + along), 0.0, 1.0);
    return p;
  }
  p.r = std::clamp(0.5 * (1.0 + nb), 0.0, 1.0);
  p.theta = std::atan2(across, along);
  return p;
}

CMatrix rho(double p, double theta) {
  const double l = 2.0 * p - 1.0;
  CMatrix m(2, 2);
  m << 0.5 * (1.0 + l * std::cos(theta)), 0.5 * l * std::sin(theta), 0.5 * l * std::sin(theta),
      0.5 * (1.0 - l * std::cos(theta));
  return m;
}

double g(const QubitPair& p, double phi) {
  const double d = sqrt0(1.0 + (2.0 * p.s - 1.0) * std::cos(phi)) - sqrt0(1.0 + (2.0 * p.r - 1.0) * std::cos(p.theta + phi));
  return 0.25 * d * d;
}

std::array<Complex, 7> stationary_polynomial(const QubitPair& p) {
  const Complex zeta = std::polar(1.0, p.theta);
  const Complex z2 = zeta * zeta;
  const double a = 2.0 * p.s - 1.0;
  const double b = 2.0 * p.r - 1.0;
  const Poly left = multiply({a, 2.0, a}, {1.0, 0.0, -2.0 * z2, 0.0, z2 * z2});
  const Poly right = multiply({1.0, 0.0, -2.0, 0.0, 1.0}, {b, 2.0 * zeta, b * z2});
  std::array<Complex, 7> out{};
  for (std::size_t k = 0; k < 7; ++k) out[k] = b * b * left[k] - zeta * a * a * right[k];
  return out;
}

Candidate grid_maximum(const QubitPair& pair, int samples) {
  if (samples < 8) throw Error(ErrorKind::InvalidArgument, "grid needs at least 8 samples");
  const double h = kTwoPi / samples;
  Candidate top{0.0, g(pair, 0.0)};
  for (int k = 1; k < samples; ++k) {
    const double phi = k * h;
    const double v = g(pair, phi);
    if (v > top.g) top = {phi, v};
  }
  // golden-section refinement inside the bracketing cells
  const double inv = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = top.phi - h, hi = top.phi + h;
  double x1 = hi - inv * (hi - lo), x2 = lo + inv * (hi - lo);
  double f1 = g(pair, x1), f2 = g(pair, x2);
  for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv * (hi - lo);
      f2 = g(pair, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv * (hi - lo);
      f1 = g(pair, x1);
    }
  }
  const double mid = 0.5 * (lo + hi);
  const double fm = g(pair, mid);
  if (fm > top.g) top = {wrap(mid), fm};
  return top;
}

QubitResult cost_exact(const QubitPair& in) {
  check_unit(in.s, "s");
  check_unit(in.r, "r");
  if (!std::isfinite(in.theta)) throw Error(ErrorKind::InvalidArgument, "theta must be finite");
  const QubitPair pair{in.s, in.r, wrap(in.theta)};

  QubitResult res;
  bool exact_match = true;
  auto near = [&](double gap, double tol) {
    if (gap > tol) return false;
    if (gap > 0.0) exact_match = false;
    return true;
  };
  auto pure_gap = [](double p) { return std::min(p, 1.0 - p); };

  const double d0 = angle_gap(pair.theta, 0.0);
  const double dpi = angle_gap(pair.theta, M_PI);
  const double dsame = std::abs(pair.s - pair.r);
  const double dflip = std::abs(pair.s - (1.0 - pair.r));

  if (near(std::min(pure_gap(pair.s), pure_gap(pair.r)), kPureTol)) {
    res.branch = Branch::Pure;
    res.value = pure_cost(pair);
    try {
      res.candidates = root_candidates(pair);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoConvergence) throw;
    }
  } else if (near(std::min(d0, dpi), kAngleTol)) {
    res.branch = Branch::Commuting;
    const QubitPair diag{pair.s, d0 <= dpi ? pair.r : 1.0 - pair.r, 0.0};
    res.value = commuting_cost(diag.r, diag.s);
    res.candidates = commuting_candidates(diag);
  } else if (near(std::min(dsame, dflip), kSpectrumTol)) {
    res.branch = Branch::Isospectral;
    const double theta = dsame <= dflip ? pair.theta : pair.theta - M_PI;
    res.value = isospectral_cost(pair.s, wrap(theta));
    res.candidates = isospectral_candidates(pair, pair.s, theta);
  } else {
    return generic(pair);
  }

  if (!exact_match) {
    const QubitResult gen = generic(pair);
    if (gen.value > res.value) {
      res.value = gen.value;
      res.fallback = gen.fallback;
    }
    res.candidates.insert(res.candidates.end(), gen.candidates.begin(), gen.candidates.end());
  }
  res.value = std::clamp(res.value, 0.0, 0.5);
  return res;
}

double cost_upper_left(const DensityMatrix& rho_a, const DensityMatrix& rho_b, const CMatrix& u) {
  if (rho_a.dim() != 2 || rho_b.dim() != 2 || u.rows() != 2 || u.cols() != 2)
    throw Error(ErrorKind::DimensionMismatch, "qubit states and a 2x2 unitary required");
  const double a = (u.adjoint() * rho_a.matrix() * u)(0, 0).real();
  const double b = (u.adjoint() * rho_b.matrix() * u)(0, 0).real();
  const double d = sqrt0(a) - sqrt0(b);
  return 0.5 * d * d;
}

double commuting_cost(double r, double s) {
  check_unit(r, "r");
  check_unit(s, "s");
  const double up = std::sqrt(r) - std::sqrt(s);
  const double down = std::sqrt(1.0 - r) - std::sqrt(1.0 - s);
  return 0.5 * std::max(up * up, down * down);
}

double mixed_cost(double lambda) {
  check_unit(lambda, "lambda");
  const double a = 1.0 - std::sqrt(2.0 * lambda);
  const double b = 1.0 - std::sqrt(2.0 * (1.0 - lambda));
  return 0.25 * std::max(a * a, b * b);
}

double isospectral_cost(double s, double theta) {
  check_unit(s, "s");
  const double h = std::sin(0.5 * theta);
  return (0.5 - std::sqrt(s * (1.0 - s))) * h * h;
}

double antipodal_cost(double t) {
  check_unit(t, "tau norm");
  return commuting_cost(0.5 * (1.0 + t), 0.5 * (1.0 - t));
}

double decohered_commuting_cost(double r, double s, double alpha) {
  check_unit(r, "r");
  check_unit(s, "s");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::AlphaOutOfRange, "alpha must lie in [0, 1]");
  const double up = std::sqrt(r) - std::sqrt(s);
  const double down = std::sqrt(1.0 - r) - std::sqrt(1.0 - s);
  const double r0 = up * up >= down * down ? r : 1.0 - r;
  const double s0 = up * up >= down * down ? s : 1.0 - s;
  if (r0 + s0 == 0.0) return 0.0;
  const double geo = std::sqrt(r0 * s0);
  const double breakpoint = 2.0 * geo / (r0 + s0);
  if (alpha < breakpoint) return 0.5 * std::sqrt(1.0 - alpha * alpha) * std::abs(r0 - s0);
  const double d = std::sqrt(r0) - std::sqrt(s0);
  return 0.5 * d * d + (1.0 - alpha) * geo;
}

double isospectral_distance_variant(double lambda, double theta) {
  check_unit(lambda, "lambda");
  return std::sqrt(M_SQRT1_2 - std::sqrt(lambda * (1.0 - lambda))) * std::abs(std::sin(0.5 * theta));
}

double antipodal_distance_variant(double t) {
  check_unit(t, "tau norm");
  return std::sqrt(1.0 - std::sqrt(1.0 - t * t));
}

}  // namespace qot::qubit
