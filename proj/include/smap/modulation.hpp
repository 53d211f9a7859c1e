#pragma once

#include "smap/gauge.hpp"

namespace smap {

// Gauge-normalized scale/rotation pair of a map near the harmonic family,
// selected by the orthogonality <z, h1>_{H1e} = 0.
struct ModulationState {
  double s = 1.0;
  double alpha = 0.0;
};

// Coordinates of e^{-alpha R} v(s r) in the orthonormal basis {j, J^h j, h}:
//   e^{-alpha R} v(s .) = z1 j + z2 J^h j + (1 + gamma) h.
struct Decomposition {
  ComplexField z;   // z1 + i z2
  RealField gamma;  // (1+gamma) h-coefficient minus one
  Vec3Field xi;     // z1 j + z2 J^h j + gamma h
};

// Componentwise projection onto {j, J^h j, h} after rescaling/rotation.
// Beyond the grid v is extended by the equivariant power law.
Decomposition decompose(const EquivariantMap& u, const ModulationState& state);

// F(u, s, alpha) = ( <h1, z1>_{H1e}, <h1, z2>_{H1e} ), evaluated through the
// closed form of N0 h1 (primary) and cross-checked against the direct H1e
// inner products (the two agree by integration by parts).
struct FMapValue {
  double f1 = 0, f2 = 0;
  double route_disagreement = 0;  // relative gap between the two evaluations
};
FMapValue f_map(const EquivariantMap& u, const ModulationState& state);

// Newton solve of F(u, s, alpha) = 0 with a finite-difference Jacobian.
// Throws NumericalError when no root is found in 50 iterations or s leaves
// the positive half-line.
ModulationState solve_scaling_pair(const EquivariantMap& u, const ModulationState& init);
ModulationState solve_scaling_pair(const EquivariantMap& u);  // warm start from closest_harmonic

// H1-closest harmonic map: minimizes ||u - e^{aR} Q(./s)||_{H1} over (s, a).
// The rotation minimization is exact per scale (the objective is a sinusoid
// in alpha); the scale search is a log-grid scan plus golden-section refine.
struct ClosestHarmonic {
  ModulationState state;
  double dist = 0;
};
ClosestHarmonic closest_harmonic(const EquivariantMap& u, double admission_delta = 0.3);

}  // namespace smap
