#pragma once

#include "smap/calculus.hpp"
#include "smap/harmonic.hpp"

namespace smap {

// Symmetric finite-volume discretization of H_k = d_rr + (1/r) d_r - k^2/r^2,
// written as (1/r)(r f')' - (k^2/r^2) f with zero ghost values at both ends.
// The matrix W H (W = diag(cell_w)) is symmetric, so Crank-Nicolson built on
// this stencil is exactly unitary in the cell-weighted L2_e inner product.
struct HkStencil {
  std::vector<double> sub, diag, sup;  // tridiagonal rows
  std::vector<double> cell_w;          // finite-volume cell measures for r dr
  GridPtr grid;
  int k = 0;
};

HkStencil build_hk_stencil(const GridPtr& g, int k);

// Discretized H_k f on the finite-volume stencil.
RealField apply_hk(const RealField& f, int k);
ComplexField apply_hk(const ComplexField& f, int k);
ComplexField apply_stencil(const HkStencil& st, const ComplexField& f);
RealField apply_stencil(const HkStencil& st, const RealField& f);

// N0 = -H_m.
ComplexField apply_n0(const ComplexField& f, int m);
RealField apply_n0(const RealField& f, int m);

// L0 f = f' + (m/r) h3 f. The kernel is span{h1}.
ComplexField apply_l0(const ComplexField& f, int m);
RealField apply_l0(const RealField& f, int m);

// Solves L0 z = g via the integrating factor 1/h1:
//   z(r) = h1(r) [ c + int_{r_a}^{r} g/h1 dr' ],
// anchored mid-grid, with c fixed by the orthogonality <z, h1>_{H1e} = 0.
// Throws NumericalError("no admissible solution") when g grows at infinity.
ComplexField solve_l0(const ComplexField& g, int m);
RealField solve_l0(const RealField& g, int m);

// <f, g>_{H1e} = int ( f_r conj(g_r) + (m^2/r^2) f conj(g) ) r dr.
// Conjugate-symmetric by construction. Throws on mismatched grids.
Complex inner_h1e(const ComplexField& f, const ComplexField& g, int m);
double inner_h1e(const RealField& f, const RealField& g, int m);

// int f N0h1 r dr through the closed form of N0 h1 (no derivative of f).
// For real f this is <h1, f>_{H1e} by integration by parts; for complex
// f = f1 + i f2 it packs (<h1,f1>, <h1,f2>) into one complex number.
Complex pair_n0h1(const ComplexField& f, int m);
double pair_n0h1(const RealField& f, int m);

double h1e_norm(const ComplexField& f, int m);   // sqrt(<f,f>_{H1e})
double h1e_norm2(const ComplexField& f, int m);

}  // namespace smap
