#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "qot/cost_model.hpp"
#include "qot/error.hpp"
#include "qot/linalg.hpp"
#include "qot/metrics.hpp"
#include "qot/qubit.hpp"
#include "qot/transport.hpp"
#include "support.hpp"

using namespace qot;
using namespace qot::qubit;

namespace {

DensityMatrix diag2(double a) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = 1.0 - a;
  return validate_state(m);
}

double sdp(const QubitPair& p) {
  const auto s = solve(CouplingProblem(validate_state(rho(p.s, 0.0)), validate_state(rho(p.r, p.theta)), simplex_cost(2).matrix));
  REQUIRE(s.converged);
  return s.value;
}

QubitPair random_pair(Rng& rng) { return {rng.uniform(), rng.uniform(), rng.uniform(0.0, 2.0 * M_PI)}; }

double exact(const DensityMatrix& a, const DensityMatrix& b) { return cost_exact(canonicalize(a, b)).value; }

}  // namespace

TEST_CASE("canonical form of a qubit pair") {
  auto p = canonicalize(diag2(0.7), diag2(0.2));
  CHECK(p.s == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(p.r == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(p.theta == 0.0);
  p = canonicalize(maximally_mixed(2), random_density(2, 3));
  CHECK(p.theta == 0.0);
  CHECK(p.s == 0.5);
  p = canonicalize(diag2(1.0), qubit_state(1, 0, 0));
  CHECK(p.s == doctest::Approx(1.0));
  CHECK(p.r == doctest::Approx(1.0));
  CHECK(p.theta == doctest::Approx(M_PI / 2).epsilon(1e-14));
  // the canonical pair is a unitary invariant and reproduces both states up to rotation
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto a = random_density(2, seed), b = random_density(2, seed + 100);
    const auto q = canonicalize(a, b);
    const CMatrix u = linalg::random_unitary(2, seed + 200);
    const auto uq = canonicalize(conjugate(a, u), conjugate(b, u));
    CHECK(std::abs(q.s - uq.s) <= 1e-12);
    CHECK(std::abs(q.r - uq.r) <= 1e-12);
    CHECK(std::abs(q.theta - uq.theta) <= 1e-10);
    CHECK(q.s >= 0.5);
    CHECK(std::abs(fidelity(a, b) - fidelity(validate_state(rho(q.s, 0)), validate_state(rho(q.r, q.theta)))) <= 1e-12);
    CHECK(std::abs(trace_distance(a, b) - trace_distance(validate_state(rho(q.s, 0)), validate_state(rho(q.r, q.theta)))) <= 1e-12);
  }
}

TEST_CASE("dispatch examples") {
  CHECK(cost_exact({0.3, 0.3, 0.0}).value == doctest::Approx(0.0));
  auto r = cost_exact({1.0, 0.5, 1.234});
  CHECK(r.branch == Branch::Pure);
  CHECK(r.value == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(cost_exact({0.7, 0.2, 0.0}).branch == Branch::Commuting);
  CHECK(cost_exact({0.7, 0.2, M_PI}).branch == Branch::Commuting);
  CHECK(cost_exact({0.7, 0.7, 1.0}).branch == Branch::Isospectral);
  CHECK(cost_exact({0.7, 0.3, 1.0}).branch == Branch::Isospectral);
  r = cost_exact({0.3, 0.6, 1.0});
  CHECK(r.branch == Branch::Generic);
  CHECK(std::abs(r.value - sdp({0.3, 0.6, 1.0})) <= 1e-6);
  CHECK_THROWS_AS(cost_exact({1.2, 0.5, 0.0}), Error);
  CHECK(to_string(Branch::Isospectral) == "isospectral");
}

TEST_CASE("cost_exact agrees with the dense grid") {
  Rng rng(61);
  for (int k = 0; k < 100; ++k) {
    const auto p = random_pair(rng);
    const auto r = cost_exact(p);
    CHECK(std::abs(r.value - grid_maximum(p).g) <= 1e-8);
    CHECK(!r.fallback);
  }
}

TEST_CASE("stationary points of the sextic") {
  Rng rng(62);
  for (int k = 0; k < 200; ++k) {
    const auto p = random_pair(rng);
    const auto r = cost_exact(p);
    if (r.branch != Branch::Generic) continue;
    CHECK(r.candidates.size() >= 2);
    CHECK(r.candidates.size() <= 6);
    // squaring the stationarity condition admits extraneous roots, but the
    // winning candidate is a critical point of g
    Candidate top{0.0, -1.0};
    for (const auto& c : r.candidates) {
      CHECK(c.g == doctest::Approx(g(p, c.phi)).epsilon(1e-15));
      if (c.g > top.g) top = c;
    }
    CHECK(r.value == doctest::Approx(top.g).epsilon(1e-15));
    const double h = 1e-6;
    CHECK(std::abs((g(p, top.phi + h) - g(p, top.phi - h)) / (2 * h)) <= 1e-6);
    // polynomial roots are the candidates
    const auto poly = stationary_polynomial(p);
    double scale = 0.0;
    for (auto c : poly) scale = std::max(scale, std::abs(c));
    for (const auto& c : r.candidates) CHECK(std::abs(linalg::poly_eval(poly, std::polar(1.0, c.phi))) <= 1e-7 * scale);
  }
}

TEST_CASE("cost_exact agrees with the SDP on every branch") {
  Rng rng(63);
  for (int k = 0; k < 60; ++k) {
    QubitPair p = random_pair(rng);
    switch (k % 5) {
      case 1: p.s = 1.0; break;
      case 2: p.theta = k % 2 ? 0.0 : M_PI; break;
      case 3: p.r = p.s; break;
      case 4: p.r = 1.0 - p.s; break;
      default: break;
    }
    CHECK(std::abs(cost_exact(p).value - sdp(p)) <= 1e-6);
  }
}

TEST_CASE("upper-left maximand never exceeds the cost") {
  const auto a = diag2(0.8), b = diag2(0.3);
  CHECK(cost_upper_left(a, b, CMatrix::Identity(2, 2)) == doctest::Approx(0.5 * std::pow(std::sqrt(0.8) - std::sqrt(0.3), 2)));
  CMatrix flip(2, 2);
  flip << 0, 1, 1, 0;
  CHECK(std::max(cost_upper_left(a, b, CMatrix::Identity(2, 2)), cost_upper_left(a, b, flip)) ==
        doctest::Approx(commuting_cost(0.8, 0.3)).epsilon(1e-14));
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto x = random_density(2, seed), y = random_density(2, seed + 1000);
    const double t = exact(x, y);
    double best = 0.0;
    for (std::uint64_t k = 0; k < 10; ++k) best = std::max(best, cost_upper_left(x, y, linalg::random_unitary(2, seed * 16 + k)));
    CHECK(best <= t + 1e-9);
  }
}

TEST_CASE("commuting closed form") {
  CHECK(commuting_cost(0.4, 0.4) == 0.0);
  CHECK(commuting_cost(1.0, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(commuting_cost(0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(commuting_cost(0.3, 0.7) == doctest::Approx(0.041742430504416).epsilon(1e-12));
  // the interior stationary point never beats the endpoints
  Rng rng(64);
  for (int k = 0; k < 200; ++k) {
    const double r = rng.uniform(), s = rng.uniform();
    const auto res = cost_exact({s, r, 0.0});
    double top = 0.0;
    for (const auto& c : res.candidates) top = std::max(top, c.g);
    CHECK(top <= commuting_cost(r, s) + 1e-15);
  }
}

TEST_CASE("maximally mixed partner") {
  CHECK(mixed_cost(0.5) == 0.0);
  CHECK(mixed_cost(1.0) == doctest::Approx(0.25));
  CHECK(mixed_cost(0.75) == doctest::Approx(0.25 * std::pow(1 - std::sqrt(0.5), 2)).epsilon(1e-14));
  CHECK(mixed_cost(0.75) == doctest::Approx(0.021446609406726).epsilon(1e-12));
  for (double l = 0.0; l <= 1.0; l += 0.05) CHECK(std::abs(mixed_cost(l) - commuting_cost(0.5, l)) <= 1e-15);
}

TEST_CASE("isospectral closed form") {
  for (double t : {0.3, 1.0, 2.5}) CHECK(isospectral_cost(0.5, t) == 0.0);
  CHECK(isospectral_cost(0.0, M_PI) == doctest::Approx(0.5));
  CHECK(isospectral_cost(0.25, M_PI) == doctest::Approx(0.5 - std::sqrt(0.1875)).epsilon(1e-14));
  CHECK(isospectral_cost(0.25, M_PI) == doctest::Approx(0.066987298107781).epsilon(1e-12));
  // pure limit agrees with (1 - Tr a b) / 2
  for (double t : {0.2, 1.1, 2.9}) {
    const double overlap_ab = (rho(1.0, 0) * rho(1.0, t)).trace().real();
    CHECK(isospectral_cost(1.0, t) == doctest::Approx(0.5 * (1 - overlap_ab)).epsilon(1e-14));
  }
}

TEST_CASE("antipodal closed form") {
  CHECK(antipodal_cost(0.0) == 0.0);
  CHECK(antipodal_cost(1.0) == doctest::Approx(0.5));
  CHECK(antipodal_cost(0.6) == doctest::Approx(0.1).epsilon(1e-14));
  for (double t = 0.05; t < 1.0; t += 0.1) {
    CHECK(antipodal_cost(t) == doctest::Approx(0.5 * (1 - std::sqrt(1 - t * t))).epsilon(1e-13));
    // the distance is half the Bures distance, the lower end of the bound chain
    const auto plus = qubit_state(0, 0, t), minus = qubit_state(0, 0, -t);
    CHECK(std::sqrt(antipodal_cost(t)) == doctest::Approx(bures_distance(plus, minus) / 2.0).epsilon(1e-12));
    CHECK(antipodal_distance_variant(t) == doctest::Approx(bures_distance(plus, minus) / std::sqrt(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("competing isospectral form is nonzero for identical states") {
  CHECK(isospectral_distance_variant(0.5, M_PI) > 0.4);
  CHECK(isospectral_cost(0.5, M_PI) == 0.0);
}

TEST_CASE("decohered commuting cost") {
  CHECK(decohered_commuting_cost(0.3, 0.7, 1.0) == doctest::Approx(commuting_cost(0.3, 0.7)).epsilon(1e-14));
  CHECK(decohered_commuting_cost(0.3, 0.7, 0.0) == doctest::Approx(0.2).epsilon(1e-15));
  for (double a : {0.0, 0.3, 0.9, 1.0}) {
    CHECK(decohered_commuting_cost(0.0, 0.6, a) == doctest::Approx(decohered_commuting_cost(0.0, 0.6, 0.0)).epsilon(1e-14));
    CHECK(decohered_commuting_cost(1.0, 0.2, a) == doctest::Approx(decohered_commuting_cost(1.0, 0.2, 0.0)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(decohered_commuting_cost(0.3, 0.7, 1.1), Error);

  Rng rng(65);
  for (int k = 0; k < 200; ++k) {
    const double r = rng.uniform(0.01, 0.99), s = rng.uniform(0.01, 0.99);
    CHECK(std::abs(decohered_commuting_cost(r, s, 1.0) - commuting_cost(r, s)) <= 1e-14);
    CHECK(std::abs(decohered_commuting_cost(r, s, 0.0) - 0.5 * std::abs(r - s)) <= 1e-15);
    if (std::abs(r - s) < 1e-3) continue;
    // continuity at the breakpoint
    const double up = std::pow(std::sqrt(r) - std::sqrt(s), 2), down = std::pow(std::sqrt(1 - r) - std::sqrt(1 - s), 2);
    const double r0 = up >= down ? r : 1 - r, s0 = up >= down ? s : 1 - s;
    const double bp = 2 * std::sqrt(r0 * s0) / (r0 + s0);
    const double left = decohered_commuting_cost(r, s, std::nextafter(bp, 0.0));
    const double right = decohered_commuting_cost(r, s, bp);
    CHECK(std::abs(left - right) <= 1e-12);
    // strictly decreasing in alpha
    for (double a = 0.05; a < 0.96; a += 0.1) {
      const double h = 1e-5;
      CHECK((decohered_commuting_cost(r, s, a + h) - decohered_commuting_cost(r, s, a - h)) / (2 * h) < -1e-9);
    }
  }
}

TEST_CASE("decohered cost agrees with the SDP on the dephased cost") {
  Rng rng(66);
  for (int k = 0; k < 20; ++k) {
    const double r = rng.uniform(), s = rng.uniform(), a = rng.uniform();
    const CMatrix c = dephase_cost(simplex_cost(2), a);
    const auto sol = solve(CouplingProblem(diag2(r), diag2(s), c));
    REQUIRE(sol.converged);
    CHECK(std::abs(sol.value - decohered_commuting_cost(r, s, a)) <= 1e-6);
  }
}

TEST_CASE("square root of the decohered cost is a distance on commuting qubits") {
  Rng rng(67);
  for (int k = 0; k < 2000; ++k) {
    const double a = rng.uniform();
    const double x = rng.uniform(), y = rng.uniform(), z = rng.uniform();
    auto d = [&](double u, double v) { return std::sqrt(decohered_commuting_cost(u, v, a)); };
    CHECK(d(x, y) + d(y, z) - d(x, z) >= -1e-9);
  }
}

TEST_CASE("transport distances of order two and three satisfy the triangle inequality") {
  Rng rng(68);
  double worst2 = 1.0, worst3 = 1.0;
  for (int k = 0; k < 2000; ++k) {
    const auto a = test::random_qubit(rng), b = test::random_qubit(rng), c = test::random_qubit(rng);
    const double ab = exact(a, b), bc = exact(b, c), ac = exact(a, c);
    worst2 = std::min(worst2, std::sqrt(ab) + std::sqrt(bc) - std::sqrt(ac));
    worst3 = std::min(worst3, std::cbrt(ab) + std::cbrt(bc) - std::cbrt(ac));
  }
  CHECK(worst2 >= -1e-7);
  CHECK(worst3 >= -1e-7);
}

TEST_CASE("order-one transport violates the triangle inequality") {
  // I/2 at the midpoint between two orthogonal pure states
  const auto up = diag2(1.0), down = diag2(0.0), mid = maximally_mixed(2);
  CHECK(exact(up, mid) + exact(mid, down) - exact(up, down) == doctest::Approx(0.0).epsilon(1e-14));
  const auto near = diag2(0.9);
  CHECK(exact(up, near) + exact(near, mid) - exact(up, mid) < -1e-3);
}
