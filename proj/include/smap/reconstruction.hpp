#pragma once

#include "smap/modulation.hpp"

namespace smap {

// Gauge-side coordinates (q, s, alpha) of a map near the harmonic family.
struct GaugedState {
  ComplexField q;
  double s = 1.0;
  double alpha = 0.0;
  int m = 1;
};

struct ReconstructOptions {
  double tol = 1e-10;          // relative z-update stop
  int max_iters = 100;
  double admission_l2 = 0.3;   // ||q||_{L2e} ceiling for the chart
  bool track_contraction = true;
};

struct ReconstructStats {
  int iterations = 0;
  double final_update = 0;       // last relative z-update
  double contraction_max = 0;    // max ratio of consecutive update norms
};

// Inverts the gauge: the unique map u with q(u) = q and gauge-normalized pair
// (s, alpha). Fixed-point iteration on z through the structural identity
//   s e^{-aR} (q e)(s r) = (L0 z) j + (gamma h)_r + (2m/r) h3 gamma h + (m/r) xi3 xi,
// solving L0 z = (projected right-hand side) with <z, h1>_{H1e} = 0 each sweep.
// Throws NumericalError when the iteration stops contracting (q outside the
// reconstruction chart) or the state is inadmissible.
EquivariantMap reconstruct(const GaugedState& state, ReconstructStats* stats = nullptr,
                           const ReconstructOptions& opts = {});

// || u(state + pert) - u(state) ||_{H2} / (||dq||_{H1e} + |ds| + |dalpha|);
// zero perturbation returns 0 by convention.
double reconstruction_modulus(const GaugedState& state, const GaugedState& perturbation);

// GaugedState file: header (m, s, alpha, grid metadata) + rows r, Re q, Im q.
void save_gauged_state(const GaugedState& st, const std::string& path);
GaugedState load_gauged_state(const std::string& path);

}  // namespace smap
