#pragma once

// Shared numerical tolerances. Tests and solvers read from here so they agree.
namespace qot::tol {

inline constexpr double kHermitian = 1e-10;  // ||m - m^dagger||_F
inline constexpr double kEig = 1e-11;        // eigendecomposition reconstruction
inline constexpr double kRoot = 1e-8;        // |p(z)| relative to max |coeff|
inline constexpr double kPsd = 1e-10;        // admitted negative eigenvalue
inline constexpr double kTrace = 1e-10;      // |Tr rho - 1|
inline constexpr double kMarginal = 1e-8;    // coupling partial-trace residual
inline constexpr double kDualFeasible = 1e-7;
inline constexpr double kGap = 1e-6;
inline constexpr double kUnitCircle = 1e-6;  // ||z| - 1| for sextic roots
inline constexpr double kFidelityClip = 1e-12;

}  // namespace qot::tol
