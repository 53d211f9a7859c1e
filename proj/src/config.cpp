#include "smap/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace smap {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  std::size_t b = s.find_last_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": malformed section");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    std::string full = section.empty() ? key : section + "." + key;
    cfg.kv_[full] = val;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

bool KeyValueConfig::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("config key '" + key + "' is missing");
  return it->second;
}
std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}
double KeyValueConfig::get_double(const std::string& key) const {
  std::string s = get_string(key);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ConfigError("config key '" + key + "' is not a number: '" + s + "'");
  return v;
}
double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}
long KeyValueConfig::get_int(const std::string& key) const {
  std::string s = get_string(key);
  char* end = nullptr;
  long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw ConfigError("config key '" + key + "' is not an integer: '" + s + "'");
  return v;
}
long KeyValueConfig::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

ExperimentConfig ExperimentConfig::from_kv(const KeyValueConfig& kv) {
  ExperimentConfig c;
  c.m = int(kv.get_int("experiment.m", 1));
  if (c.m < 1) throw ConfigError("experiment.m must be a positive integer");

  std::string pipe = kv.get_string("experiment.pipeline", "both");
  if (pipe == "direct") c.pipeline = Pipeline::Direct;
  else if (pipe == "gauged") c.pipeline = Pipeline::Gauged;
  else if (pipe == "both") c.pipeline = Pipeline::Both;
  else throw ConfigError("experiment.pipeline must be direct|gauged|both");

  c.seed = std::uint64_t(kv.get_int("experiment.seed", 0));

  c.r_min = kv.get_double("grid.r_min", kDefaultRMin);
  c.r_max = kv.get_double("grid.r_max", kDefaultRMax);
  c.n = std::size_t(kv.get_int("grid.n", long(kDefaultN)));

  c.direct_dr_core = kv.get_double("direct.dr_core", 9e-4);
  c.direct_r_core = kv.get_double("direct.r_core", 3.0);
  c.direct_ratio = kv.get_double("direct.ratio", 1.012);
  c.direct_cfl = kv.get_double("direct.cfl", 0.2);

  std::string init = kv.get_string("initial.type", "harmonic");
  if (init == "harmonic") c.initial = InitialKind::Harmonic;
  else if (init == "perturbed-harmonic") c.initial = InitialKind::PerturbedHarmonic;
  else if (init == "from-file") c.initial = InitialKind::FromFile;
  else throw ConfigError("initial.type must be harmonic|perturbed-harmonic|from-file");
  c.s0 = kv.get_double("initial.s", 1.0);
  c.alpha0 = kv.get_double("initial.alpha", 0.0);
  c.delta = kv.get_double("initial.delta", 0.0);
  c.bump_center = kv.get_double("initial.bump_center", 0.0);
  c.bump_width = kv.get_double("initial.bump_width", 0.6);
  c.bump_phase = kv.get_double("initial.bump_phase", 0.0);
  c.initial_file = kv.get_string("initial.file", "");
  if (c.initial == InitialKind::FromFile && c.initial_file.empty())
    throw ConfigError("initial.type = from-file requires initial.file");
  if (c.delta < 0 || c.delta > 0.3)
    throw ConfigError("initial.delta must lie in [0, 0.3] (admission threshold)");

  c.dt = kv.get_double("time.dt", 1e-4);
  c.t_end = kv.get_double("time.T", 0.05);
  c.s_floor_factor = kv.get_double("time.s_floor_factor", 1e-3);
  c.admission_delta = kv.get_double("time.admission_delta", 0.3);

  c.snapshot_every = int(kv.get_int("output.snapshot_every", 0));
  c.out_dir = kv.get_string("output.dir", ".");
  c.quiet = kv.get_int("output.quiet", 0) != 0;

  auto parse_list = [](const std::string& s) {
    std::vector<double> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!trim(tok).empty()) out.push_back(std::stod(trim(tok)));
    }
    return out;
  };
  if (kv.has("converge.dt_factors"))
    c.ladder_dt_factors = parse_list(kv.get_string("converge.dt_factors"));
  if (kv.has("converge.grid_n")) {
    for (double v : parse_list(kv.get_string("converge.grid_n")))
      c.ladder_n.push_back(std::size_t(v));
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  return from_kv(KeyValueConfig::parse_file(path));
}

}  // namespace smap
