#pragma once

#include "qot/states.hpp"

namespace qot {

/// Uhlmann-Jozsa fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2.
double fidelity(const DensityMatrix& a, const DensityMatrix& b);

double root_infidelity(const DensityMatrix& a, const DensityMatrix& b);  // sqrt(1 - F)
double bures_distance(const DensityMatrix& a, const DensityMatrix& b);   // sqrt(2 (1 - sqrt F))
double bures_angle(const DensityMatrix& a, const DensityMatrix& b);      // (2 / pi) arccos sqrt F

/// Half the trace norm of a - b.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Tr(a b), the Hilbert-Schmidt overlap.
double overlap(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace qot
