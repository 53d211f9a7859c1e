#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "smap/grid.hpp"

namespace smap {

// Flat key-value configuration with [sections]; diffable and hand-editable.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;  // keys are "section.key"
};

enum class Pipeline { Direct, Gauged, Both };
enum class InitialKind { Harmonic, PerturbedHarmonic, FromFile };

struct ExperimentConfig {
  int m = 1;

  // working (gauge) grid
  double r_min = kDefaultRMin, r_max = kDefaultRMax;
  std::size_t n = kDefaultN;

  // direct-solver grid
  double direct_dr_core = 9e-4, direct_r_core = 3.0, direct_ratio = 1.012;
  double direct_cfl = 0.2;

  InitialKind initial = InitialKind::Harmonic;
  double s0 = 1.0, alpha0 = 0.0;
  double delta = 0.0;
  double bump_center = 0.0, bump_width = 0.6, bump_phase = 0.0;
  std::string initial_file;

  Pipeline pipeline = Pipeline::Both;
  double dt = 1e-4;          // gauged pipeline step
  double t_end = 0.05;
  double s_floor_factor = 1e-3;
  double admission_delta = 0.3;

  std::uint64_t seed = 0;
  int snapshot_every = 0;
  std::string out_dir = ".";
  bool quiet = false;

  // convergence ladders
  std::vector<double> ladder_dt_factors;  // e.g. {4, 2, 1}
  std::vector<std::size_t> ladder_n;      // e.g. {1024, 2048, 4096}

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_kv(const KeyValueConfig& kv);
};

}  // namespace smap
