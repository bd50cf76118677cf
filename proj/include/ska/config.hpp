#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ska/analysis.hpp"

namespace ska {

class bad_config : public std::runtime_error {
public:
  explicit bad_config(const std::string& what) : std::runtime_error("config: " + what) {}
};

// Flat key=value text; '#' starts a comment, blank lines ignored.
inline std::map<std::string, std::string> parse_config(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    size_t a = line.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    size_t b = line.find_last_not_of(" \t");
    line = line.substr(a, b - a + 1);
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw bad_config("line " + std::to_string(lineno) + ": expected key=value");
    std::string k = line.substr(0, eq), v = line.substr(eq + 1);
    while (!k.empty() && (k.back() == ' ' || k.back() == '\t')) k.pop_back();
    size_t vs = v.find_first_not_of(" \t");
    v = vs == std::string::npos ? "" : v.substr(vs);
    if (k.empty()) throw bad_config("line " + std::to_string(lineno) + ": empty key");
    kv[k] = v;
  }
  return kv;
}

inline std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw bad_config("cannot open " + path);
  return parse_config(is);
}

namespace detail {

inline int64_t config_int(const std::map<std::string, std::string>& kv, const std::string& key,
                          int64_t dflt) {
  auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  try {
    size_t used = 0;
    int64_t v = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw bad_config(key + ": not an integer: " + it->second);
  }
}

inline double config_double(const std::map<std::string, std::string>& kv, const std::string& key,
                            double dflt) {
  auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  try {
    size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw bad_config(key + ": not a number: " + it->second);
  }
}

}  // namespace detail

// Maps flat keys onto an ExperimentConfig; unknown keys are rejected so typos
// fail loudly. The extractor (variant B) is loaded separately by the caller
// from the "extractor" path key.
struct LoadedConfig {
  ExperimentConfig experiment;
  std::string extractor_path;  // empty unless set
};

inline LoadedConfig config_to_experiment(const std::map<std::string, std::string>& kv) {
  static const std::map<std::string, int> known = {
      {"variant", 0},   {"n", 0},        {"epsilon", 0},   {"trials", 0},
      {"seed", 0},      {"c", 0},        {"y_mode", 0},    {"y_flips", 0},
      {"workers", 0},   {"n_max", 0},    {"step_budget", 0}, {"extractor", 0},
      {"base_space", 0}, {"ratio_num", 0}, {"ratio_den", 0}, {"i_min", 0},
      {"i_max", 0},     {"space_cap", 0},
  };
  for (const auto& [k, v] : kv)
    if (!known.count(k)) throw bad_config("unknown key: " + k);

  LoadedConfig out;
  ExperimentConfig& c = out.experiment;
  if (auto it = kv.find("variant"); it != kv.end()) {
    if (it->second != "A" && it->second != "B") throw bad_config("variant must be A or B");
    c.variant = it->second[0];
  }
  c.n = int(detail::config_int(kv, "n", c.n));
  c.epsilon = detail::config_double(kv, "epsilon", c.epsilon);
  c.trials = uint64_t(detail::config_int(kv, "trials", int64_t(c.trials)));
  c.master_seed = uint64_t(detail::config_int(kv, "seed", int64_t(c.master_seed)));
  c.c_param = int(detail::config_int(kv, "c", c.c_param));
  if (auto it = kv.find("y_mode"); it != kv.end()) {
    if (it->second == "equal") c.y_mode = ExperimentConfig::YMode::Equal;
    else if (it->second == "flip_k") c.y_mode = ExperimentConfig::YMode::FlipK;
    else if (it->second == "random") c.y_mode = ExperimentConfig::YMode::Random;
    else throw bad_config("y_mode must be equal, flip_k, or random");
  }
  c.y_flips = int(detail::config_int(kv, "y_flips", c.y_flips));
  c.workers = int(detail::config_int(kv, "workers", c.workers));
  c.n_max = int(detail::config_int(kv, "n_max", c.n_max));
  c.step_budget = uint64_t(detail::config_int(kv, "step_budget", int64_t(c.step_budget)));
  c.schedule.base_space = uint32_t(detail::config_int(kv, "base_space", c.schedule.base_space));
  c.schedule.ratio_num = uint32_t(detail::config_int(kv, "ratio_num", c.schedule.ratio_num));
  c.schedule.ratio_den = uint32_t(detail::config_int(kv, "ratio_den", c.schedule.ratio_den));
  c.schedule.i_min = int(detail::config_int(kv, "i_min", c.schedule.i_min));
  c.schedule.i_max = int(detail::config_int(kv, "i_max", c.schedule.i_max));
  c.schedule.cap = uint32_t(detail::config_int(kv, "space_cap", c.schedule.cap));
  c.schedule.validate();
  if (auto it = kv.find("extractor"); it != kv.end()) out.extractor_path = it->second;

  if (c.n < 1 || c.n > c.n_max) throw bad_config("n out of range");
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) throw bad_config("epsilon must be in (0,1)");
  if (c.y_flips < 0 || c.y_flips > c.n) throw bad_config("y_flips out of range");
  if (c.workers < 1) throw bad_config("workers must be >= 1");
  return out;
}

}  // namespace ska
