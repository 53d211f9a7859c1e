#include "smap/trajectory.hpp"

#include <cmath>
#include <cstdio>

namespace smap {

std::string to_string(HaltReason h) {
  switch (h) {
    case HaltReason::Completed: return "completed";
    case HaltReason::SFloor: return "s_floor";
    case HaltReason::Instability: return "instability";
    case HaltReason::ChartExit: return "chart_exit";
    case HaltReason::UserAbort: return "user_abort";
  }
  return "?";
}

void StrichartzAccumulator::add(double dt, double l2x, double l4x, double l8x) {
  sup_l2 = std::max(sup_l2, l2x);
  int_l4 += dt * std::pow(l4x, 4.0);
  int_l83 += dt * std::pow(l8x, 8.0 / 3.0);
}

double StrichartzAccumulator::l4l4() const { return std::pow(int_l4, 0.25); }
double StrichartzAccumulator::l83l8() const { return std::pow(int_l83, 3.0 / 8.0); }

void write_trajectory_jsonl(const Trajectory& tr, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw ConfigError("cannot open '" + path + "' for writing");
  for (const auto& d : tr.records) {
    std::fprintf(fp,
                 "{\"t\":%.17g,\"s\":%.17g,\"alpha\":%.17g,\"s_star\":%.17g,"
                 "\"alpha_star\":%.17g,\"energy\":%.17g,\"q_l2\":%.17g,\"q_h1\":%.17g,"
                 "\"str_linf_l2\":%.17g,\"str_l4l4\":%.17g,\"str_l83l8\":%.17g,"
                 "\"h3_ratio\":%.17g,\"mod_oracle_resid\":%.17g,\"s_inf\":%.17g}\n",
                 d.t, d.s, d.alpha, d.s_star, d.alpha_star, d.energy, d.q_l2, d.q_h1,
                 d.str_linf_l2, d.str_l4l4, d.str_l83l8, d.h3_ratio, d.mod_oracle_resid,
                 d.s_inf);
  }
  std::fprintf(fp, "{\"halt\":\"%s\",\"detail\":\"%s\"}\n", to_string(tr.halt).c_str(),
               tr.halt_detail.c_str());
  std::fclose(fp);
}

}  // namespace smap
