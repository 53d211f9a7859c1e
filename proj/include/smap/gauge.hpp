#pragma once

#include "smap/operators.hpp"
#include "smap/sphere_map.hpp"

namespace smap {

// Tangent-plane orthonormal frame {e, J^v e} transported along r (D_r e = 0),
// normalized toward (1,0,0) at the outer boundary.
struct GaugeFrame {
  Vec3Field e_hat;
  Vec3Field f_hat;  // J^v e = v x e
};

// Fields extracted in the Coulomb frame.
struct GaugeData {
  ComplexField q;    // (v_r - (m/r) J^v R v) . (e + i J^v e)
  ComplexField nu;   // (J^v R v) . (e + i J^v e)
  Vec3Field W;       // v_r - (m/r) J^v R v
  ComplexField p;    // i ( q_r + q/r - (m/r) v3 q ), pairs with dt v
  RealField conn;    // temporal connection dt e . J e, integrated from a_r
  RealField n_of_q;  // nonlocal potential N(q)
};

// Integrates dr e = -(e . v_r) v inward from r_n with classical RK4 on the
// transformed coordinate and per-step re-orthogonalization against v.
// Requires |v(r_n) - k| small (gauge chart at the outer boundary).
GaugeFrame build_frame(const EquivariantMap& u);

// Extracts all gauge fields; conn is computed independently from p and agrees
// with N(q) up to discretization (checked by tests, not enforced here).
GaugeData gauge_data(const EquivariantMap& u, const GaugeFrame& frame);

// Nonlocal potential N(q), computed by BOTH the defining tail integral
//   N = Re int_r^oo (conj q + (m/r') conj nu)(q_r + (1 - m v3) q / r') dr'
// and the integration-by-parts V-form
//   N = -V + int_r^oo (2/r') V dr',  V = |q|^2/2 + Re[(m/r) conj(nu) q].
// Returns the V-form; relative L2_e disagreement beyond `tol` signals a
// discretization bug and throws NumericalError.
RealField nonlocal_n(const ComplexField& q, const ComplexField& nu, const RealField& v3,
                     int m, double tol = 1e-6, double* rel_discrepancy = nullptr);

// Columnar text: r, Re q, Im q, Re nu, Im nu, N.
void save_gauge_data(const GaugeData& gd, int m, const std::string& path);

}  // namespace smap
