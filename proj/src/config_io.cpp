#include "certctrl/config_io.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace certctrl {
namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double to_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  const double x = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw std::invalid_argument("config: bad number for " + key + ": " + v);
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  const long long x = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size())
    throw std::invalid_argument("config: bad integer for " + key + ": " + v);
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  const unsigned long long x = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size())
    throw std::invalid_argument("config: bad integer for " + key + ": " + v);
  return x;
}

std::vector<std::string> split_csv(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Mode mode_from_name(const std::string& name) {
  if (name == "classification") return Mode::kClassification;
  if (name == "regression") return Mode::kRegression;
  if (name == "nonrobust_cls") return Mode::kNonrobustCls;
  if (name == "nonrobust_reg") return Mode::kNonrobustReg;
  throw std::invalid_argument("config: unknown mode: " + name);
}

GridAttack attack_from_name(const std::string& name) {
  if (name == "none") return GridAttack::kNone;
  if (name == "stability") return GridAttack::kStability;
  if (name == "efficiency") return GridAttack::kEfficiency;
  throw std::invalid_argument("config: unknown attack: " + name);
}

}  // namespace

std::map<std::string, std::string> parse_ini(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key");
    if (!section.empty()) key = section + "." + key;
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot read " + path);
  return parse_ini(in);
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "vehicle.m", "vehicle.i_z", "vehicle.l_f", "vehicle.l_r",
      "table",
      "smoothing.noise_std", "smoothing.n0", "smoothing.n", "smoothing.alpha",
      "design.v_min", "design.v_max", "design.lambda_gp", "design.k_bar",
      "design.r_lo", "design.rdot_bound", "design.v_tol", "design.k_rel_tol",
      "road.preset", "road.duration",
      "pipeline.scene_dim", "pipeline.scene_spacing", "pipeline.cluster_std",
      "pipeline.sharpness", "pipeline.dt", "pipeline.lane_half_width",
      "pipeline.gamma", "pipeline.q_scale", "pipeline.reg_epsilon",
      "pipeline.beta", "pipeline.beta_validation", "pipeline.seed",
      "grid.modes", "grid.noise_stds", "grid.attacks", "grid.trials",
      "grid.attack_epsilon", "grid.attack_steps", "grid.workers",
      "grid.label_weights",
      "out_dir",
  };
  return keys;
}

bool set_key(ToolConfig& cfg, const std::string& key,
             const std::string& value) {
  PipelineConfig& p = cfg.pipeline;
  GridSpec& g = cfg.grid;

  if (key == "vehicle.m") p.vehicle.m = to_double(key, value);
  else if (key == "vehicle.i_z") p.vehicle.i_z = to_double(key, value);
  else if (key == "vehicle.l_f") p.vehicle.l_f = to_double(key, value);
  else if (key == "vehicle.l_r") p.vehicle.l_r = to_double(key, value);
  else if (key == "table") {
    const std::string t = trim(value);
    if (t == "weather") p.table = StiffnessTable::weather_default();
    else if (t == "road") p.table = StiffnessTable::road_default();
    else throw std::invalid_argument("config: unknown table preset: " + t);
  }
  else if (key == "smoothing.noise_std") p.smoothing.noise_std = to_double(key, value);
  else if (key == "smoothing.n0") p.smoothing.n0 = static_cast<int>(to_int(key, value));
  else if (key == "smoothing.n") p.smoothing.n = static_cast<int>(to_int(key, value));
  else if (key == "smoothing.alpha") p.smoothing.alpha = to_double(key, value);
  else if (key == "design.v_min") p.design.v_min = to_double(key, value);
  else if (key == "design.v_max") p.design.v_max = to_double(key, value);
  else if (key == "design.lambda_gp") p.design.lambda_gp = to_double(key, value);
  else if (key == "design.k_bar") p.design.k_bar = to_double(key, value);
  else if (key == "design.r_lo") p.design.r_lo = to_double(key, value);
  else if (key == "design.rdot_bound") p.design.rdot_bound = to_double(key, value);
  else if (key == "design.v_tol") p.design.v_tol = to_double(key, value);
  else if (key == "design.k_rel_tol") p.design.k_rel_tol = to_double(key, value);
  else if (key == "road.preset") {
    const std::string t = trim(value);
    if (t == "default") p.road = PipelineConfig::defaults().road;
    else if (t == "straight") p.road = RoadProfile::straight(p.road.total_time() > 0.0 ? p.road.total_time() : 10.0);
    else throw std::invalid_argument("config: unknown road preset: " + t);
  }
  else if (key == "road.duration") {
    const double d = to_double(key, value);
    if (!(d > 0.0)) throw std::invalid_argument("config: road.duration must be > 0");
    // Rescale the current profile to the requested total time.
    const double cur = p.road.total_time();
    if (cur <= 0.0) {
      p.road = RoadProfile::straight(d);
    } else {
      for (auto& seg : p.road.segments) seg.duration *= d / cur;
    }
  }
  else if (key == "pipeline.scene_dim") p.scene_dim = static_cast<int>(to_int(key, value));
  else if (key == "pipeline.scene_spacing") p.scene_spacing = to_double(key, value);
  else if (key == "pipeline.cluster_std") p.cluster_std = to_double(key, value);
  else if (key == "pipeline.sharpness") p.sharpness = to_double(key, value);
  else if (key == "pipeline.dt") p.dt = to_double(key, value);
  else if (key == "pipeline.lane_half_width") p.lane_half_width = to_double(key, value);
  else if (key == "pipeline.gamma") p.gamma = to_double(key, value);
  else if (key == "pipeline.q_scale") p.q_scale = to_double(key, value);
  else if (key == "pipeline.reg_epsilon") p.reg_epsilon = to_double(key, value);
  else if (key == "pipeline.beta") p.beta = to_double(key, value);
  else if (key == "pipeline.beta_validation") p.beta_validation = static_cast<int>(to_int(key, value));
  else if (key == "pipeline.seed") p.seed = to_u64(key, value);
  else if (key == "grid.modes") {
    g.modes.clear();
    for (const auto& name : split_csv(value)) g.modes.push_back(mode_from_name(name));
  }
  else if (key == "grid.noise_stds") {
    g.noise_stds.clear();
    for (const auto& s : split_csv(value)) g.noise_stds.push_back(to_double(key, s));
  }
  else if (key == "grid.attacks") {
    g.attacks.clear();
    for (const auto& name : split_csv(value)) g.attacks.push_back(attack_from_name(name));
  }
  else if (key == "grid.trials") g.trials = static_cast<int>(to_int(key, value));
  else if (key == "grid.attack_epsilon") g.attack_epsilon = to_double(key, value);
  else if (key == "grid.attack_steps") g.attack_steps = static_cast<int>(to_int(key, value));
  else if (key == "grid.workers") g.workers = static_cast<int>(to_int(key, value));
  else if (key == "grid.label_weights") {
    g.label_weights.clear();
    for (const auto& s : split_csv(value))
      g.label_weights.push_back(to_double(key, s));
  }
  else if (key == "out_dir") cfg.out_dir = trim(value);
  else return false;
  return true;
}

void apply_settings(ToolConfig& cfg,
                    const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (!set_key(cfg, key, value))
      throw std::invalid_argument("config: unknown key: " + key);
  }
}

void apply_env(ToolConfig& cfg) {
  for (const std::string& key : known_keys()) {
    std::string env_name = "CERTCTRL_";
    for (char c : key)
      env_name += c == '.' ? '_'
                           : static_cast<char>(
                                 std::toupper(static_cast<unsigned char>(c)));
    const char* v = std::getenv(env_name.c_str());
    if (v != nullptr) set_key(cfg, key, v);
  }
}

ToolConfig load_tool_config(
    const std::string& file_path,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  ToolConfig cfg;
  if (!file_path.empty()) apply_settings(cfg, read_config_file(file_path));
  apply_env(cfg);
  for (const auto& [key, value] : overrides) {
    if (!set_key(cfg, key, value))
      throw std::invalid_argument("config: unknown key: " + key);
  }
  cfg.pipeline.validate();
  cfg.grid.validate();
  return cfg;
}

}  // namespace certctrl
