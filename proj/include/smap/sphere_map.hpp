#pragma once

#include <cstdint>
#include <string>

#include "smap/calculus.hpp"
#include "smap/harmonic.hpp"

namespace smap {

// Scale/rotation coordinates on the harmonic-map family e^{aR} Q(./s).
struct HarmonicParams {
  double s = 1.0;
  double alpha = 0.0;
};

struct BoundaryTol {
  double inner = 0.05;  // v approaches -k only like r^m, keep the inner end lenient
  double outer = 1e-3;  // 2 (s/r_max)^m for the admitted scale range
};

// Radial profile v(r) of an m-equivariant sphere-valued map u = e^{m theta R} v(r).
// The angular factor is symbolic: every norm in use reduces to weighted radial
// integrals, so only the profile is stored.
struct EquivariantMap {
  int m = 1;
  Vec3Field v;

  const GridPtr& grid() const { return v.grid; }
  std::size_t size() const { return v.v.size(); }
};

// Validation of the Sigma_m membership invariants (unit sphere, boundary values,
// finite samples). Throws NumericalError on violation.
void validate_map(const EquivariantMap& u, const BoundaryTol& tol = {});

// Projects every sample back to the unit sphere.
void normalize_profile(EquivariantMap& u);

// e^{alpha R} h(r/s) with h = (h1, 0, h3). Rejects s <= 0.
EquivariantMap harmonic_map(int m, HarmonicParams p, const GridPtr& g);

// Evaluate profile v at scaled radii v(scale*r), extending beyond the grid by
// the equivariant power law (v1,v2) ~ r^{+-m} with v3 from the unit norm.
Vec3Field resample_profile(const Vec3Field& v, double scale, int m);

// Rotate profile about the vertical axis.
Vec3Field rotate_profile(const Vec3Field& v, double alpha);

// E(u) = pi * int ( |v_r|^2 + m^2 (v1^2+v2^2)/r^2 ) r dr.
double energy(const EquivariantMap& u);

// Energy split into tension + topological parts:
//   E(u) = pi int |v_r - (m/r) J^v R v|^2 r dr + 4 pi m.
// Returns {tension integral, 4 pi m}.
struct BogomolnySplit {
  double tension = 0;
  double topological = 0;
};
BogomolnySplit bogomolny_split(const EquivariantMap& u);

// H1 seminorm distance of two maps with equal m on the same grid.
double dist_h1(const EquivariantMap& a, const EquivariantMap& b);
double h1_seminorm(const EquivariantMap& u);

struct SobolevNorms {
  double h1 = 0, h2 = 0, h3 = 0;
};
SobolevNorms sobolev_norms(const EquivariantMap& u);

// || v x (v_rr + v_r/r + (m^2/r^2) R^2 v) ||_{L2_e}; vanishes on harmonic maps.
double stationarity_residual(const EquivariantMap& u);

// ---- profile construction helpers ----

// Unit-sphere map assembled from a tangent seed z(r) relative to h:
//   v = z1 j + z2 J^h j + (1+gamma) h,  gamma = sqrt(1-|z|^2) - 1.
EquivariantMap map_from_tangent_seed(int m, const ComplexField& z);

struct BumpSpec {
  double amplitude = 0.1;  // seed amplitude before delta calibration
  double center_x = 0.0;   // center in the transformed coordinate
  double width_x = 0.6;
  double phase = 0.0;
};

// Perturbed harmonic map with excess-energy parameter delta:
// sqrt(E - 4 pi m) = delta (calibrated by secant on the seed amplitude).
EquivariantMap perturbed_harmonic(int m, double delta, const BumpSpec& spec, const GridPtr& g);

// Deterministic randomized perturbed maps for property sweeps.
EquivariantMap random_perturbed(int m, double delta_max, std::uint64_t seed, const GridPtr& g);

// ---- columnar text serialization: header + rows r v1 v2 v3 ----
void save_profile(const EquivariantMap& u, const std::string& path);
EquivariantMap load_profile(const std::string& path);

}  // namespace smap
