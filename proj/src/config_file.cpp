#include "cfpc/config_file.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace cfpc {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<int>(x);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects an unsigned integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string&)>;

const std::map<std::string, Setter>& schema() {
  static const std::map<std::string, Setter> table = {
      {"system.num_ues", [](auto& c, auto& k, auto& v) { c.system.num_ues = parse_int(k, v); }},
      {"system.num_aps", [](auto& c, auto& k, auto& v) { c.system.num_aps = parse_int(k, v); }},
      {"system.antennas_per_ap",
       [](auto& c, auto& k, auto& v) { c.system.antennas_per_ap = parse_int(k, v); }},
      {"system.cluster_size",
       [](auto& c, auto& k, auto& v) { c.system.cluster_size = parse_int(k, v); }},
      {"system.area_side_m",
       [](auto& c, auto& k, auto& v) { c.system.area_side_m = parse_double(k, v); }},
      {"system.ap_height_m",
       [](auto& c, auto& k, auto& v) { c.system.ap_height_m = parse_double(k, v); }},
      {"system.ue_height_m",
       [](auto& c, auto& k, auto& v) { c.system.ue_height_m = parse_double(k, v); }},
      {"system.min_ue_ap_dist_m",
       [](auto& c, auto& k, auto& v) { c.system.min_ue_ap_dist_m = parse_double(k, v); }},
      {"system.carrier_freq_ghz",
       [](auto& c, auto& k, auto& v) { c.system.carrier_freq_ghz = parse_double(k, v); }},
      {"system.bandwidth_hz",
       [](auto& c, auto& k, auto& v) { c.system.bandwidth_hz = parse_double(k, v); }},
      {"system.noise_psd_dbm_per_hz",
       [](auto& c, auto& k, auto& v) { c.system.noise_psd_dbm_per_hz = parse_double(k, v); }},
      {"system.ap_power_dbm",
       [](auto& c, auto& k, auto& v) { c.system.ap_power_w = dbm_to_w(parse_double(k, v)); }},
      {"system.ue_power_dbm",
       [](auto& c, auto& k, auto& v) { c.system.ue_power_w = dbm_to_w(parse_double(k, v)); }},
      {"system.pilot_power_dbm",
       [](auto& c, auto& k, auto& v) {
         c.system.pilot_power_w.assign(static_cast<size_t>(std::max(1, c.system.num_ues)),
                                       dbm_to_w(parse_double(k, v)));
       }},
      {"system.frame_len", [](auto& c, auto& k, auto& v) { c.system.frame_len = parse_int(k, v); }},
      {"system.pilot_len", [](auto& c, auto& k, auto& v) { c.system.pilot_len = parse_int(k, v); }},
      {"system.dl_len", [](auto& c, auto& k, auto& v) { c.system.dl_len = parse_int(k, v); }},
      {"system.ul_len", [](auto& c, auto& k, auto& v) { c.system.ul_len = parse_int(k, v); }},
      {"system.ipd_limit_w_m2",
       [](auto& c, auto& k, auto& v) { c.system.ipd_limit_w_m2 = parse_double(k, v); }},
      {"system.sar_coeff_per_kg",
       [](auto& c, auto& k, auto& v) {
         c.system.sar.assign(1, SarConstraint{parse_double(k, v),
                                              c.system.sar.empty() ? 0.08
                                                                   : c.system.sar[0].limit_w_per_kg});
       }},
      {"system.sar_limit_w_kg",
       [](auto& c, auto& k, auto& v) {
         c.system.sar.assign(
             1, SarConstraint{c.system.sar.empty() ? 8.0 : c.system.sar[0].coeff_per_kg,
                              parse_double(k, v)});
       }},
      {"system.shadowing_std_db",
       [](auto& c, auto& k, auto& v) { c.system.shadowing_std_db = parse_double(k, v); }},
      {"system.plos_cap", [](auto& c, auto& k, auto& v) { c.system.plos_cap = parse_double(k, v); }},

      {"solver.eps1_rel", [](auto& c, auto& k, auto& v) { c.solver.eps1_rel = parse_double(k, v); }},
      {"solver.eps_sco", [](auto& c, auto& k, auto& v) { c.solver.eps_sco = parse_double(k, v); }},
      {"solver.eps_lse", [](auto& c, auto& k, auto& v) { c.solver.eps_lse = parse_double(k, v); }},
      {"solver.upsilon", [](auto& c, auto& k, auto& v) { c.solver.upsilon = parse_double(k, v); }},
      {"solver.max_sco_iters",
       [](auto& c, auto& k, auto& v) { c.solver.max_sco_iters = parse_int(k, v); }},
      {"solver.max_bisect_iters",
       [](auto& c, auto& k, auto& v) { c.solver.max_bisect_iters = parse_int(k, v); }},
      {"solver.max_newton_iters",
       [](auto& c, auto& k, auto& v) { c.solver.max_newton_iters = parse_int(k, v); }},
      {"solver.barrier_t0",
       [](auto& c, auto& k, auto& v) { c.solver.barrier_t0 = parse_double(k, v); }},
      {"solver.barrier_mult",
       [](auto& c, auto& k, auto& v) { c.solver.barrier_mult = parse_double(k, v); }},
      {"solver.barrier_gap",
       [](auto& c, auto& k, auto& v) { c.solver.barrier_gap = parse_double(k, v); }},

      {"train.lr", [](auto& c, auto& k, auto& v) { c.train.lr = parse_double(k, v); }},
      {"train.lr_decay", [](auto& c, auto& k, auto& v) { c.train.lr_decay = parse_double(k, v); }},
      {"train.decay_epochs",
       [](auto& c, auto& k, auto& v) {
         c.train.decay_epochs.clear();
         for (const auto& item : split_list(v)) c.train.decay_epochs.push_back(parse_int(k, item));
       }},
      {"train.max_epochs",
       [](auto& c, auto& k, auto& v) { c.train.max_epochs = parse_int(k, v); }},
      {"train.batch_size",
       [](auto& c, auto& k, auto& v) { c.train.batch_size = parse_int(k, v); }},
      {"train.l2", [](auto& c, auto& k, auto& v) { c.train.l2 = parse_double(k, v); }},
      {"train.beta1", [](auto& c, auto& k, auto& v) { c.train.beta1 = parse_double(k, v); }},
      {"train.beta2", [](auto& c, auto& k, auto& v) { c.train.beta2 = parse_double(k, v); }},
      {"train.adam_eps", [](auto& c, auto& k, auto& v) { c.train.adam_eps = parse_double(k, v); }},
      {"train.seed", [](auto& c, auto& k, auto& v) { c.train.seed = parse_u64(k, v); }},

      {"run.policies", [](auto& c, auto&, auto& v) { c.policies = split_list(v); }},
      {"run.beamformer", [](auto& c, auto&, auto& v) { c.beamformer = v; }},
      {"run.direction", [](auto& c, auto&, auto& v) { c.direction = v; }},
      {"run.eval_mode", [](auto& c, auto&, auto& v) { c.eval_mode = v; }},
      {"run.trials", [](auto& c, auto& k, auto& v) { c.trials = parse_int(k, v); }},
      {"run.samples", [](auto& c, auto& k, auto& v) { c.samples = parse_int(k, v); }},
      {"run.seed", [](auto& c, auto& k, auto& v) { c.seed = parse_u64(k, v); }},
      {"run.out_dir", [](auto& c, auto&, auto& v) { c.out_dir = v; }},

      {"ml.unfold", [](auto& c, auto& k, auto& v) { c.unfold = parse_bool(k, v); }},
      {"ml.stages", [](auto& c, auto& k, auto& v) { c.stages = parse_int(k, v); }},
      {"ml.model_path", [](auto& c, auto&, auto& v) { c.model_path = v; }},
      {"ml.stage_model_paths", [](auto& c, auto&, auto& v) { c.stage_model_paths = split_list(v); }},
      {"ml.dataset_path", [](auto& c, auto&, auto& v) { c.dataset_path = v; }},
  };
  return table;
}

const std::vector<std::string> kKnownPolicies = {"upc",         "fpc-fair", "fpc-opp",
                                                 "opc-maximin", "opc-lse",  "e2e-dnn",
                                                 "u-dnn"};

} // namespace

void ExperimentConfig::validate() const {
  try {
    system.validate();
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (policies.empty()) throw ConfigError("config: policy list is empty");
  for (const auto& p : policies)
    if (std::find(kKnownPolicies.begin(), kKnownPolicies.end(), p) == kKnownPolicies.end())
      throw ConfigError("config: unknown policy '" + p + "'");
  if (beamformer != "cb" && beamformer != "rzf")
    throw ConfigError("config: beamformer must be cb or rzf");
  if (direction != "dl" && direction != "ul")
    throw ConfigError("config: direction must be dl or ul");
  if (eval_mode != "estimated" && eval_mode != "true")
    throw ConfigError("config: eval_mode must be estimated or true");
  if (trials < 0) throw ConfigError("config: trials must be non-negative");
  if (samples < 1) throw ConfigError("config: samples must be positive");
  if (stages < 1) throw ConfigError("config: stages must be positive");
  if (out_dir.empty()) throw ConfigError("config: out_dir must not be empty");
}

void apply_preset(ExperimentConfig& cfg, const std::string& name) {
  if (name == "paper") {
    cfg.system = SystemConfig{};
    cfg.trials = 10;
    cfg.samples = 2000;
  } else if (name == "small") {
    cfg.system = SystemConfig{};
    cfg.system.num_ues = 4;
    cfg.system.num_aps = 8;
    cfg.system.antennas_per_ap = 2;
    cfg.system.cluster_size = 3;
    cfg.trials = 50;
    cfg.samples = 2000;
  } else {
    throw ConfigError("config: unknown preset '" + name + "' (expected small or paper)");
  }
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open '" + path + "'");

  std::string line, section;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: malformed section header at line " + std::to_string(line_no));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value at line " + std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError("config: key '" + key + "' appears before any [section]");
    const std::string full = section + "." + key;
    const auto it = schema().find(full);
    if (it == schema().end()) throw ConfigError("config: unknown key '" + full + "'");
    it->second(base, full, value);
  }
  return base;
}

int resolve_batch_size(const ExperimentConfig& cfg) {
  if (cfg.train.batch_size > 0) return cfg.train.batch_size;
  return cfg.direction == "ul" ? 64 : 256;
}

} // namespace cfpc
