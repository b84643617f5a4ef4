#pragma once

#include <cstdint>
#include <random>

#include "qot/linalg.hpp"

namespace qot {

/// splitmix64 finalizer; gives an independent stream per (master, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Seeded generator. No global state: every sampler takes one explicitly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Complex Ginibre matrix with independent standard-normal real and
/// imaginary parts.
CMatrix ginibre(int rows, int cols, Rng& rng);

}  // namespace qot
