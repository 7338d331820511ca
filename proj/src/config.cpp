#include "lfoeq/config.hpp"

#include <fstream>
#include <sstream>

#include "lfoeq/errors.hpp"

namespace lfoeq {

namespace {

const std::map<std::string, std::string>& registry_defaults() {
  static const std::map<std::string, std::string> defaults = {
      {"env", "pendulum"},
      {"mode", "both"},  // gail | gaifo | both
      {"seeds", "0,1,2,3,4"},
      {"out_dir", "runs/out"},
      {"workers", "2"},

      {"imitation.batch_size", "1024"},
      {"imitation.gen_updates_per_cycle", "3"},
      {"imitation.disc_updates_per_cycle", "1"},
      {"imitation.gamma", "0.995"},
      {"imitation.lambda", "0.97"},
      {"imitation.max_kl", "0.01"},
      {"imitation.value_lr", "0.001"},
      {"imitation.value_iters", "5"},
      {"imitation.disc_lr", "0.0003"},
      {"imitation.disc_entropy_coef", "0.001"},
      {"imitation.policy_entropy_coef", "0.0"},
      {"imitation.input_norm", "true"},
      {"imitation.spectral_norm", "false"},
      {"imitation.noise_bound", "0.0"},
      {"imitation.total_env_steps", "150000"},
      {"imitation.horizon", "200"},
      {"imitation.hidden", "100,100"},
      {"imitation.activation", "tanh"},
      {"imitation.eval_every_cycles", "10"},
      {"imitation.eval_episodes", "10"},

      {"expert.budget_steps", "400000"},
      {"expert.plateau_window", "20"},
      {"expert.min_cycles", "40"},
      {"expert.seed", "0"},

      {"dataset.path", ""},  // empty: <out_dir>/<env>_expert.bin
      {"dataset.n_trajectories", "20"},
      {"dataset.seed", "1000"},
      {"dataset.subsample_n", "0"},  // 0 keeps every trajectory

      {"ablate.traj_counts", "1,5,20"},

      {"analysis.epsilons", "0,0.01,0.02"},
      {"analysis.probe_candidates", "100"},
      {"analysis.probe_radius", "5.0"},
      {"analysis.xi_deltas", "0.2,0.1,0.05,0.025"},
      {"analysis.xi_grid_points", "201"},
      {"analysis.xi_states", "50"},
      {"analysis.seed", "7"},

      {"tabular.n_random_mdps", "50"},
      {"tabular.n_unique_mdps", "20"},
      {"tabular.policy_pairs", "10"},
      {"tabular.mc_rollouts", "20000"},
      {"tabular.seed", "11"},
  };
  return defaults;
}

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

}  // namespace

ExperimentConfig::ExperimentConfig() : values_(registry_defaults()) {}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open config file " + path);
  ExperimentConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << path << ":" << line_no << ": expected key = value";
      throw ConfigError(msg.str());
    }
    config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

void ExperimentConfig::apply_override(const std::string& key_equals_value) {
  std::size_t eq = key_equals_value.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override must have the form key=value: " +
                      key_equals_value);
  }
  set(trim(key_equals_value.substr(0, eq)), trim(key_equals_value.substr(eq + 1)));
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (registry_defaults().find(key) == registry_defaults().end()) {
    throw ConfigError("unknown config key: " + key);
  }
  values_[key] = value;
}

const std::string& ExperimentConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key: " + key);
  return it->second;
}

double ExperimentConfig::get_double(const std::string& key) const {
  try {
    return std::stod(get(key));
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + " is not a number: " + get(key));
  }
}

long ExperimentConfig::get_long(const std::string& key) const {
  try {
    return std::stol(get(key));
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + " is not an integer: " + get(key));
  }
}

int ExperimentConfig::get_int(const std::string& key) const {
  return static_cast<int>(get_long(key));
}

bool ExperimentConfig::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key " + key + " is not a boolean: " + v);
}

std::vector<double> ExperimentConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& part : split_commas(get(key))) {
    try {
      out.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + " has a non-numeric entry: " + part);
    }
  }
  return out;
}

std::vector<long> ExperimentConfig::get_long_list(const std::string& key) const {
  std::vector<long> out;
  for (const auto& part : split_commas(get(key))) {
    try {
      out.push_back(std::stol(part));
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + " has a non-integer entry: " + part);
    }
  }
  return out;
}

void ExperimentConfig::write_resolved(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write resolved config to " + path);
  for (const auto& [key, value] : values_) {
    out << key << " = " << value << "\n";
  }
  if (!out) throw IoFailure("write to " + path + " failed");
}

}  // namespace lfoeq
