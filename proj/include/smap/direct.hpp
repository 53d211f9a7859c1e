#pragma once

#include "smap/evolution.hpp"

namespace smap {

// Grid for the explicit solver: uniform core (0, r_core] at spacing dr_core
// plus a geometric tail up to r_max. The core resolves the soliton under the
// CFL budget dt <= cfl * min(dr)^2; the quasi-static far field tolerates the
// growing cells.
GridPtr build_direct_grid(double dr_core = 9e-4, double r_core = 3.0, double ratio = 1.012,
                          double r_max = 1e4);

// v x (H_m v1, H_m v2, H0 v3) on the symmetric stencils; boundary rows frozen.
// Tangent to the sphere pointwise by the cross product.
Vec3Field direct_rhs(const EquivariantMap& u);

struct DirectEvolveConfig {
  double cfl = 0.2;               // dt = cfl * min(dr)^2 unless dt overrides
  double dt = 0;                  // 0: derive from the CFL budget
  double t_end = 0.05;
  int record_every = 0;           // 0: ~64 records over the run
  int snapshot_every = 0;
  std::string snapshot_prefix;
  GridPtr gauge_grid;             // log grid for gauge extraction (default_grid if null)
  bool extract_gauge = true;      // per-record (q, s, alpha, s*, alpha*)
  double instability_norm = 0.1;  // |v| drift beyond this before renormalization halts
  // invoked at every record with the current map (on the solver grid)
  std::function<void(double, const EquivariantMap&)> on_record;
};

class DirectEvolver {
 public:
  DirectEvolver(EquivariantMap initial, const DirectEvolveConfig& cfg);

  // one RK4 + renormalization step; throws on instability
  void step();
  double dt() const { return dt_; }
  const EquivariantMap& map() const { return u_; }
  double time() const { return t_; }

 private:
  EquivariantMap u_;
  HkStencil st_m_, st_0_;
  double dt_ = 0, t_ = 0;
  double instability_norm_;
  std::vector<Vec3> k1_, k2_, k3_, k4_, tmp_;
  void rhs_into(const std::vector<Vec3>& v, std::vector<Vec3>& out) const;
};

struct DirectEvolveResult {
  Trajectory trajectory;
  EquivariantMap final_map;
};

DirectEvolveResult evolve_direct(const EquivariantMap& initial, const DirectEvolveConfig& cfg);

// Interpolates a direct-grid profile onto another grid (4-point Lagrange in
// log r) with the equivariant power-law extension beyond the source range.
EquivariantMap resample_map_to_grid(const EquivariantMap& u, const GridPtr& dst);

}  // namespace smap
