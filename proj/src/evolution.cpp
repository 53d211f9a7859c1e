#include "smap/evolution.hpp"

#include <cmath>

namespace smap {

RealField potential_terms(const Vec3Field& v, int m) {
  const auto& g = v.grid;
  RealField v3(g);
  for (std::size_t i = 0; i < g->size(); ++i) v3.v[i] = v.v[i].z;
  RealField v3r = deriv_r_hi(v3);
  RealField out(g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    double r = g->r()[i];
    out.v[i] = m * (1.0 + v3.v[i]) * (m * v3.v[i] - m - 2.0) / (r * r) +
               m * v3r.v[i] / r;
  }
  return out;
}

OdeCoefficients assemble_ode_coefficients(const Decomposition& d, int m,
                                          const RealField* gprofile) {
  const auto& g = d.z.grid;
  const auto& r = g->r();
  const auto& w = g->weights();
  const std::size_t n = g->size();

  ComplexField zr = deriv_r_hi(d.z);
  RealField gamr = deriv_r_hi(d.gamma);

  OdeCoefficients c;
  c.hnorm2 = h1_norm2_h1e(m);

  // A entries: H1e pairings with h1 via the N0 h1 closed form, plus the
  // r N0h1 . z_r terms of the scaling direction
  double g2lin1 = 0, g2lin2 = 0;
  Complex g1{};
  double a11 = 0, a12 = 0, a21 = 0, a22g = 0, a22r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double rr = r[i];
    double h1 = h1_of(rr, m), h3 = h3_of(rr, m);
    double p = n0h1_of(rr, m);
    double z1 = d.z.v[i].real(), z2 = d.z.v[i].imag();
    double gam = d.gamma.v[i];
    a11 += w[i] * p * (gam * h1 - z2 * h3);
    a12 += w[i] * (rr * p) * zr.v[i].real();
    a21 += w[i] * p * (z1 * h3);
    a22g += w[i] * p * (gam * h1);
    a22r += w[i] * (rr * p) * zr.v[i].imag();

    // linear part of G2 via L0 N0 h1 in closed form
    double l0p = l0n0h1_of(rr, m);
    Complex l0z = zr.v[i] + (double(m) / rr) * h3 * d.z.v[i];
    g2lin1 += w[i] * l0p * l0z.imag();
    g2lin2 -= w[i] * l0p * l0z.real();

    // quadratic correction with the injected profile g (default h1)
    double gp = gprofile ? gprofile->v[i] : h1;
    double gpr;
    if (gprofile) {
      gpr = 0;  // set below by a second pass when a custom profile is present
    } else {
      gpr = dh1_of(rr, m);
    }
    double h1g = h1 * gp;
    double h1g_r = gprofile ? 0.0 : (dh1_of(rr, m) * gp + h1 * gpr);
    Complex z = d.z.v[i];
    Complex izr = Complex{0, 1};
    Complex term = izr * gpr * (-gam * zr.v[i] + z * gamr.v[i]) +
                   (double(m) / rr) * h1g *
                       Complex{-2.0 * gamr.v[i] - 0.0, -z2 * zr.v[i].real() + z1 * zr.v[i].imag()} +
                   (double(m) / rr) * h1g_r * (Complex{gam * gam, 0} - izr * z2 * z) +
                   izr * (double(m * m) / (rr * rr)) * (2.0 * h1 * h1 - 1.0) * gp * gam * z -
                   izr * (2.0 * double(m * m) / (rr * rr)) * h1 * h3 * gp * z2 * z;
    g1 += w[i] * term;
  }

  if (gprofile) {
    // custom profile: derivatives by finite differences
    RealField gpr_f = deriv_r_hi(*gprofile);
    RealField h1g(g);
    for (std::size_t i = 0; i < n; ++i) h1g.v[i] = h1_of(r[i], m) * gprofile->v[i];
    RealField h1g_r = deriv_r_hi(h1g);
    g1 = Complex{};
    for (std::size_t i = 0; i < n; ++i) {
      double rr = r[i];
      double h1 = h1_of(rr, m), h3 = h3_of(rr, m);
      double z1 = d.z.v[i].real(), z2 = d.z.v[i].imag();
      double gam = d.gamma.v[i];
      Complex z = d.z.v[i];
      Complex izr = Complex{0, 1};
      Complex term =
          izr * gpr_f.v[i] * (-gam * zr.v[i] + z * gamr.v[i]) +
          (double(m) / rr) * h1g.v[i] *
              Complex{-2.0 * gamr.v[i], -z2 * zr.v[i].real() + z1 * zr.v[i].imag()} +
          (double(m) / rr) * h1g_r.v[i] * (Complex{gam * gam, 0} - izr * z2 * z) +
          izr * (double(m * m) / (rr * rr)) * (2.0 * h1 * h1 - 1.0) * gprofile->v[i] * gam * z -
          izr * (2.0 * double(m * m) / (rr * rr)) * h1 * h3 * gprofile->v[i] * z2 * z;
      g1 += w[i] * term;
    }
  }

  c.a11 = a11;
  c.a12 = a12 / double(m);
  c.a21 = a21;
  c.a22 = a22g + a22r / double(m);
  c.g1 = g1;
  c.g2_1 = g2lin1 + g1.real();
  c.g2_2 = g2lin2 + g1.imag();

  double m11 = c.hnorm2 + c.a11, m12 = c.a12, m21 = c.a21, m22 = c.hnorm2 + c.a22;
  double det = m11 * m22 - m12 * m21;
  double norm = std::max(std::abs(m11) + std::abs(m12), std::abs(m21) + std::abs(m22));
  c.condition = norm * norm / std::max(std::abs(det), 1e-300);
  return c;
}

ModulationRhs modulation_rhs(const OdeCoefficients& c, double s, int m) {
  double m11 = c.hnorm2 + c.a11, m12 = c.a12, m21 = c.a21, m22 = c.hnorm2 + c.a22;
  double det = m11 * m22 - m12 * m21;
  if (!(std::abs(det) > 1e-12 * c.hnorm2 * c.hnorm2))
    throw NumericalError("modulation_rhs: modulation chart degenerate");
  double x1 = (m22 * c.g2_1 - m12 * c.g2_2) / det;
  double x2 = (-m21 * c.g2_1 + m11 * c.g2_2) / det;
  ModulationRhs out;
  out.ds_dt = -x2 / (double(m) * s);
  out.dalpha_dt = x1 / (s * s);
  return out;
}

ModulationRhs modulation_rhs_direct(const ComplexField& q, const EquivariantMap& u,
                                    const GaugeFrame& frame, const OdeCoefficients& c,
                                    double s, double alpha) {
  const auto& g = q.grid;
  const auto& r = g->r();
  const std::size_t n = g->size();
  const int m = u.m;

  // p = i (q_r + q/r - (m/r) v3 q)
  ComplexField qr = deriv_r_hi(q);
  Vec3Field pe(g);
  for (std::size_t i = 0; i < n; ++i) {
    Complex p = Complex{0, 1} *
                (qr.v[i] + q.v[i] / r[i] - (double(m) / r[i]) * u.v.v[i].z * q.v[i]);
    pe.v[i] = p.real() * frame.e_hat.v[i] + p.imag() * frame.f_hat.v[i];
  }
  Vec3Field pes = resample_scaled_vec(pe, s);
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  double p1 = 0, p2 = 0;
  const auto& w = g->weights();
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 lhs = rotz(pes.v[i], ca, -sa);
    double h1 = h1_of(r[i], m), h3 = h3_of(r[i], m);
    double nw = n0h1_of(r[i], m) * w[i];
    p1 += nw * lhs.y;
    p2 += nw * (-lhs.x * h3 + lhs.z * h1);
  }
  OdeCoefficients cd = c;
  cd.g2_1 = s * s * p1;
  cd.g2_2 = s * s * p2;
  return modulation_rhs(cd, s, m);
}

GaugedStepper::GaugedStepper(GridPtr grid, int m)
    : st_(build_hk_stencil(grid, m + 1)) {}

namespace {

// Thomas solve of (I - i tau/2 H) x = rhs for the tridiagonal stencil
void cn_solve(const HkStencil& st, double tau, const std::vector<Complex>& rhs,
              std::vector<Complex>& x) {
  const std::size_t n = rhs.size();
  const Complex half = Complex{0, 0.5 * tau};
  static thread_local std::vector<Complex> c_prime, d_prime;
  c_prime.assign(n, Complex{});
  d_prime.assign(n, Complex{});

  // rows: (1 - half*diag) x_i - half*sub x_{i-1} - half*sup x_{i+1} = rhs_i
  Complex b0 = 1.0 - half * st.diag[0];
  Complex c0 = -half * st.sup[0];
  c_prime[0] = c0 / b0;
  d_prime[0] = rhs[0] / b0;
  for (std::size_t i = 1; i < n; ++i) {
    Complex ai = -half * st.sub[i];
    Complex bi = 1.0 - half * st.diag[i];
    Complex ci = (i + 1 < n) ? -half * st.sup[i] : Complex{};
    Complex denom = bi - ai * c_prime[i - 1];
    if (std::abs(denom) < 1e-300) throw NumericalError("gauged stepper: degenerate stencil");
    c_prime[i] = ci / denom;
    d_prime[i] = (rhs[i] - ai * d_prime[i - 1]) / denom;
  }
  x[n - 1] = d_prime[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d_prime[i] - c_prime[i] * x[i + 1];
}

}  // namespace

ComplexField GaugedStepper::linear_substep(const ComplexField& q, double tau) const {
  require_same_grid(q.grid, st_.grid);
  const std::size_t n = q.size();
  // (I - i tau/2 H) q+ = (I + i tau/2 H) q
  std::vector<Complex> rhs(n);
  const Complex half = Complex{0, 0.5 * tau};
  for (std::size_t i = 0; i < n; ++i) {
    Complex acc = (1.0 + half * st_.diag[i]) * q.v[i];
    if (i > 0) acc += half * st_.sub[i] * q.v[i - 1];
    if (i + 1 < n) acc += half * st_.sup[i] * q.v[i + 1];
    rhs[i] = acc;
  }
  ComplexField out(q.grid);
  cn_solve(st_, tau, rhs, out.v);
  return out;
}

ComplexField GaugedStepper::phase_substep(const ComplexField& q, const RealField& potential,
                                          double dt) const {
  require_same_grid(q.grid, potential.grid);
  ComplexField out(q.grid);
  for (std::size_t i = 0; i < q.size(); ++i)
    out.v[i] = q.v[i] * std::polar(1.0, -potential.v[i] * dt);
  return out;
}

ComplexField GaugedStepper::step(const ComplexField& q, const RealField& potential,
                                 double dt) const {
  ComplexField a = linear_substep(q, 0.5 * dt);
  ComplexField b = phase_substep(a, potential, dt);
  return linear_substep(b, 0.5 * dt);
}

double GaugedStepper::discrete_l2e(const ComplexField& q) const {
  double acc = 0;
  for (std::size_t i = 0; i < q.size(); ++i) acc += st_.cell_w[i] * std::norm(q.v[i]);
  return std::sqrt(acc);
}

GaugedEvolveResult evolve_gauged(const GaugedState& initial, const GaugedEvolveConfig& cfg) {
  const auto& g = initial.q.grid;
  const int m = initial.m;
  const std::size_t n = g->size();
  if (!(cfg.dt > 0) || !(cfg.t_end > 0)) throw ConfigError("evolve_gauged: dt and T must be positive");

  GaugedStepper stepper(g, m);
  const double s0 = initial.s;
  const double s_floor = cfg.s_floor_factor * s0;

  GaugedState state = initial;
  Trajectory tr;
  StrichartzAccumulator str;

  GaugedEvolveResult res;
  int snapshot_index = 0;

  auto record = [&](double t, const EquivariantMap& u, const GaugeFrame& frame,
                    const Decomposition& d, const OdeCoefficients& coef) {
    DiagnosticsRecord rec;
    rec.t = t;
    rec.s = state.s;
    rec.alpha = state.alpha;
    rec.energy = energy(u);
    rec.q_l2 = l2e_norm(state.q);
    rec.q_h1 = h1e_norm(state.q, m);
    double l2x = std::sqrt(2.0 * M_PI) * rec.q_l2;
    double i4 = 0, i8 = 0, i6 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double a2 = std::norm(state.q.v[i]);
      i4 += g->weights()[i] * a2 * a2;
      i8 += g->weights()[i] * a2 * a2 * a2 * a2;
      i6 += g->weights()[i] * a2 * a2 * a2;
    }
    double l4x = std::pow(2.0 * M_PI * i4, 0.25);
    double l8x = std::pow(2.0 * M_PI * i8, 0.125);
    double l6x = std::pow(i6, 1.0 / 6.0);
    str.add(cfg.dt * cfg.record_every, l2x, l4x, l8x);
    rec.str_linf_l2 = str.linf_l2();
    rec.str_l4l4 = str.l4l4();
    rec.str_l83l8 = str.l83l8();

    auto hq = apply_stencil(stepper.stencil(), state.q);
    double hq_n = l2e_norm(hq);
    auto sn = sobolev_norms(u);
    rec.h3_ratio = sn.h3 / (hq_n + l6x * l6x + 1.0 / (state.s * state.s));

    if (cfg.track_closest) {
      try {
        auto ch = closest_harmonic(u);
        rec.s_star = ch.state.s;
        rec.alpha_star = ch.state.alpha;
      } catch (const NumericalError&) {
        rec.s_star = 0;
        rec.alpha_star = 0;
      }
    }
    // in-run oracle for the assembled coefficients / injected g-profile
    auto rhs_a = modulation_rhs(coef, state.s, m);
    auto rhs_d = modulation_rhs_direct(state.q, u, frame, coef, state.s, state.alpha);
    double scale = std::max({std::abs(rhs_d.ds_dt), std::abs(rhs_d.dalpha_dt), 1e-12});
    rec.mod_oracle_resid =
        std::max(std::abs(rhs_a.ds_dt - rhs_d.ds_dt), std::abs(rhs_a.dalpha_dt - rhs_d.dalpha_dt)) /
        scale;
    tr.records.push_back(rec);
    if (cfg.on_record) cfg.on_record(t, u);
  };

  EquivariantMap last_good;
  try {
    const int nsteps = int(std::ceil(cfg.t_end / cfg.dt - 1e-12));
    EquivariantMap u = reconstruct(state);
    last_good = u;
    GaugeFrame frame = build_frame(u);
    Decomposition d = decompose(u, {state.s, state.alpha});
    OdeCoefficients coef =
        assemble_ode_coefficients(d, m, cfg.gprofile ? &*cfg.gprofile : nullptr);
    record(0.0, u, frame, d, coef);

    for (int step = 0; step < nsteps; ++step) {
      const double t = step * cfg.dt;

      // potential from the current reconstruction
      RealField pot = potential_terms(u.v, m);
      {
        GaugeData gd = gauge_data(u, frame);
        RealField v3(g);
        for (std::size_t i = 0; i < n; ++i) v3.v[i] = u.v.v[i].z;
        RealField nq = nonlocal_n(state.q, gd.nu, v3, m, 1e-2);
        for (std::size_t i = 0; i < n; ++i) pot.v[i] += nq.v[i];
      }

      ModulationRhs rhs1 = modulation_rhs(coef, state.s, m);

      // q advances by Strang splitting, (s, alpha) by Heun staggered with it
      ComplexField q_new = stepper.step(state.q, pot, cfg.dt);
      double s_pred = state.s + cfg.dt * rhs1.ds_dt;
      double a_pred = state.alpha + cfg.dt * rhs1.dalpha_dt;
      if (!(s_pred > s_floor)) {
        tr.halt = HaltReason::SFloor;
        tr.halt_detail = "scale hit the blow-up floor";
        break;
      }

      GaugedState pred{q_new, s_pred, a_pred, m};
      EquivariantMap u_pred = reconstruct(pred);
      GaugeFrame frame_pred = build_frame(u_pred);
      Decomposition d_pred = decompose(u_pred, {s_pred, a_pred});
      OdeCoefficients coef_pred =
          assemble_ode_coefficients(d_pred, m, cfg.gprofile ? &*cfg.gprofile : nullptr);
      ModulationRhs rhs2 = modulation_rhs(coef_pred, s_pred, m);

      state.q = q_new;
      state.s += 0.5 * cfg.dt * (rhs1.ds_dt + rhs2.ds_dt);
      state.alpha += 0.5 * cfg.dt * (rhs1.dalpha_dt + rhs2.dalpha_dt);
      if (!(state.s > s_floor)) {
        tr.halt = HaltReason::SFloor;
        tr.halt_detail = "scale hit the blow-up floor";
        break;
      }

      if ((step + 1) % cfg.reconstruct_every == 0 || step + 1 == nsteps) {
        u = reconstruct(state);
        frame = build_frame(u);
        d = decompose(u, {state.s, state.alpha});
      } else {
        u = u_pred;
        frame = frame_pred;
        d = d_pred;
      }
      last_good = u;
      coef = assemble_ode_coefficients(d, m, cfg.gprofile ? &*cfg.gprofile : nullptr);

      if ((step + 1) % cfg.record_every == 0 || step + 1 == nsteps) {
        record((step + 1) * cfg.dt, u, frame, d, coef);
      }
      if (cfg.snapshot_every > 0 && (step + 1) % cfg.snapshot_every == 0) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%s_%06d.state", cfg.snapshot_prefix.c_str(),
                      ++snapshot_index);
        save_gauged_state(state, buf);
      }
    }
    res.final_map = reconstruct(state);
  } catch (const NumericalError& e) {
    tr.halt = std::string(e.what()).find("chart") != std::string::npos
                  ? HaltReason::ChartExit
                  : HaltReason::Instability;
    tr.halt_detail = e.what();
    res.final_map = last_good;  // last reconstructed state before the halt
  }

  res.trajectory = std::move(tr);
  res.final_state = state;
  return res;
}

}  // namespace smap
