#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "qot/linalg.hpp"
#include "qot/random.hpp"
#include "qot/states.hpp"

namespace qot::test {

inline double frob(const CMatrix& m) { return m.norm(); }

inline CMatrix random_hermitian(int n, Rng& rng) {
  const CMatrix g = ginibre(n, n, rng);
  return 0.5 * (g + g.adjoint());
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

/// Random qubit state in the unit ball, radius drawn uniformly.
inline DensityMatrix random_qubit(Rng& rng) {
  double x = rng.normal(), y = rng.normal(), z = rng.normal();
  const double n = std::sqrt(x * x + y * y + z * z);
  const double r = rng.uniform();
  return qubit_state(r * x / n, r * y / n, r * z / n);
}

/// Random probability vector; `sparse` zeroes one entry.
inline std::vector<double> random_simplex(int n, Rng& rng, bool sparse) {
  std::vector<double> p(static_cast<std::size_t>(n));
  for (auto& x : p) x = -std::log(1.0 - rng.uniform());
  if (sparse) p[static_cast<std::size_t>(rng.uniform() * n) % n] = 0.0;
  double s = std::accumulate(p.begin(), p.end(), 0.0);
  if (s == 0.0) {
    p[0] = 1.0;
    s = 1.0;
  }
  for (auto& x : p) x /= s;
  return p;
}

}  // namespace qot::test
