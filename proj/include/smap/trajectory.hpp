#pragma once

#include <string>
#include <vector>

#include "smap/grid.hpp"

namespace smap {

enum class HaltReason { Completed, SFloor, Instability, ChartExit, UserAbort };

std::string to_string(HaltReason h);

// One diagnostics row per recorded step; shared by both pipelines.
struct DiagnosticsRecord {
  double t = 0;
  double s = 0, alpha = 0;            // gauge-normalized pair
  double s_star = 0, alpha_star = 0;  // closest-harmonic pair
  double energy = 0;
  double q_l2 = 0, q_h1 = 0;          // L2_e / H1_e norms of the gauge field
  double str_linf_l2 = 0;             // running sup_t ||q~||_{L2(R^2)}
  double str_l4l4 = 0;                // running L4_t L4_x norm
  double str_l83l8 = 0;               // running L^{8/3}_t L8_x norm
  double h3_ratio = 0;                // ||u||_{H3} / (||H_{m+1} q|| + ||q||_{L6}^2 + s^{-2})
  double mod_oracle_resid = 0;        // gauged pipeline: assembled-vs-direct ODE rhs gap
  double s_inf = 0;                   // running inf of s over the run so far
};

struct Trajectory {
  std::vector<DiagnosticsRecord> records;
  HaltReason halt = HaltReason::Completed;
  std::string halt_detail;
};

// Time-integral accumulators behind the Strichartz diagnostics.
struct StrichartzAccumulator {
  double sup_l2 = 0;     // sup_t ||q~||_{L2}
  double int_l4 = 0;     // int dt ||q~||_{L4}^4
  double int_l83 = 0;    // int dt ||q~||_{L8}^{8/3}
  void add(double dt, double l2x, double l4x, double l8x);
  double linf_l2() const { return sup_l2; }
  double l4l4() const;
  double l83l8() const;
};

// One JSON object per record, fixed key order, 17 significant digits.
void write_trajectory_jsonl(const Trajectory& tr, const std::string& path);

}  // namespace smap
