#include <cmath>

#include "doctest.h"
#include "qot/classical.hpp"
#include "qot/cost_model.hpp"
#include "qot/error.hpp"
#include "qot/qubit.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace qot;

TEST_CASE("probability vectors") {
  CHECK_NOTHROW(ProbabilityVector({0.5, 0.5}));
  CHECK(ProbabilityVector({1.0 + 1e-13, -1e-13})[1] == 0.0);
  CHECK_THROWS_AS(ProbabilityVector({0.5, 0.6}), Error);
  CHECK_THROWS_AS(ProbabilityVector({1.2, -0.2}), Error);
}

TEST_CASE("classical cost examples") {
  const auto simplex2 = ClassicalGeometry::simplex(2);
  const ProbabilityVector e0({1.0, 0.0}), half({0.5, 0.5});
  CHECK(classical_cost(e0, e0, simplex2) == 0.0);
  CHECK(classical_cost(e0, half, simplex2) == doctest::Approx(0.5).epsilon(1e-15));
  const ProbabilityVector p({1, 0, 0}), q({0, 0, 1});
  CHECK(classical_cost(p, q, ClassicalGeometry::line(3)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(classical_cost(p, q, ClassicalGeometry::line(3), 2.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(classical_wasserstein(p, q, ClassicalGeometry::line(3), 2.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(classical_cost(e0, p, simplex2), Error);
}

TEST_CASE("transportation simplex matches vertex enumeration") {
  Rng rng(51);
  int cases = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const int m = 2 + rep % 3, n = 2 + (rep / 3) % 3;
    const auto a = test::random_simplex(m, rng, rep % 4 == 0);
    const auto b = test::random_simplex(n, rng, rep % 5 == 0);
    RMatrix c(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) c(i, j) = rep % 7 == 0 ? std::floor(3 * rng.uniform()) : rng.uniform();
    const auto plan = transportation_simplex(a, b, c);
    CHECK(std::abs(plan.value - test::vertex_enumeration(a, b, c)) <= 1e-10);
    CHECK(plan.plan.minCoeff() >= -1e-14);
    for (int i = 0; i < m; ++i) CHECK(std::abs(plan.plan.row(i).sum() - a[static_cast<std::size_t>(i)]) <= 1e-12);
    for (int j = 0; j < n; ++j) CHECK(std::abs(plan.plan.col(j).sum() - b[static_cast<std::size_t>(j)]) <= 1e-12);
    CHECK(std::abs((plan.plan.array() * c.array()).sum() - plan.value) <= 1e-14);
    ++cases;
  }
  CHECK(cases == 200);
}

TEST_CASE("degenerate transportation problems terminate") {
  // equal marginals with repeated entries create ties and zero basic cells
  const std::vector<double> u{0.25, 0.25, 0.25, 0.25};
  RMatrix c = ClassicalGeometry::line(4).distances();
  CHECK(transportation_simplex(u, u, c).value == doctest::Approx(0.0));
  RMatrix flat = RMatrix::Ones(4, 4);
  CHECK(transportation_simplex(u, {0.5, 0.0, 0.5, 0.0}, flat).value == doctest::Approx(1.0));
}

TEST_CASE("simplex geometry gives the total variation") {
  Rng rng(52);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + rep % 4;
    const auto a = test::random_simplex(n, rng, false), b = test::random_simplex(n, rng, rep % 3 == 0);
    double tv = 0.0;
    for (int i = 0; i < n; ++i) tv += 0.5 * std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]);
    CHECK(std::abs(classical_cost(ProbabilityVector(a), ProbabilityVector(b), ClassicalGeometry::simplex(n)) - tv) <= 1e-10);
  }
}

TEST_CASE("quantum cost of diagonal states never exceeds the classical cost") {
  const auto r = quantum_vs_classical(ProbabilityVector({0.3, 0.7}), ProbabilityVector({0.7, 0.3}),
                                      ClassicalGeometry::simplex(2));
  CHECK(r.tcl == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(r.tq == doctest::Approx(0.5 * std::pow(std::sqrt(0.7) - std::sqrt(0.3), 2)).epsilon(1e-14));
  CHECK(r.ok);
  const auto same = quantum_vs_classical(ProbabilityVector({0.2, 0.8}), ProbabilityVector({0.2, 0.8}),
                                         ClassicalGeometry::simplex(2));
  CHECK(same.tq == 0.0);
  CHECK(same.tcl == 0.0);
  const auto pure = quantum_vs_classical(ProbabilityVector({1, 0, 0}), ProbabilityVector({0, 1, 0}),
                                         ClassicalGeometry::simplex(3));
  CHECK(std::abs(pure.tq - 0.5) <= 1e-9);
  CHECK(pure.tcl == doctest::Approx(1.0));
  CHECK(pure.ok);
}

TEST_CASE("classical order-2 distance of two-point distributions") {
  CHECK(classical_w2_commuting(0.4, 0.4) == 0.0);
  CHECK(classical_w2_commuting(0.3, 0.7) == doctest::Approx(std::sqrt(0.2)).epsilon(1e-15));
  CHECK(classical_w2_commuting(0.0, 1.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  Rng rng(53);
  for (int rep = 0; rep < 100; ++rep) {
    const double r = rng.uniform(), s = rng.uniform();
    CHECK(std::abs(classical_w2_commuting(r, s) - std::sqrt(qubit::decohered_commuting_cost(r, s, 0.0))) <= 1e-15);
    const double lp = classical_wasserstein(ProbabilityVector({r, 1 - r}), ProbabilityVector({s, 1 - s}),
                                            ClassicalGeometry::simplex(2), 2.0);
    // unit distances give sqrt|r - s|; classical_w2_commuting prices moves at diag(C) = E / 2
    CHECK(std::abs(lp - std::sqrt(std::abs(r - s))) <= 1e-12);
  }
}
