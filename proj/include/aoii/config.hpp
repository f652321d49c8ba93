#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aoii/mdp.hpp"
#include "aoii/model.hpp"
#include "aoii/simulator.hpp"
#include "aoii/solver.hpp"

namespace aoii {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
inline T parse_number(std::string_view text, const std::string& key, const char* kind) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ConfigError("key '" + key + "': expected " + kind + ", got '" + std::string(text) + "'");
  return value;
}

template <typename T>
inline std::vector<T> parse_list(std::string_view text, const std::string& key, const char* kind) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string_view item =
        trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (item.empty())
      throw ConfigError("key '" + key + "': empty list element");
    out.push_back(parse_number<T>(item, key, kind));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

}  // namespace detail

// Flat key = value experiment description. Unknown keys are rejected so a
// typo cannot silently fall back to a default.
struct ExperimentConfig {
  ModelParams model;
  RviOptions solver;
  long horizon = 1'000'000;
  int replications = 5;
  std::uint64_t seed = 12345;
  double burn_in = 0.01;
  int threads = 1;
  std::vector<int> sweep_n{5, 10, 20, 30};
  std::vector<double> sweep_p{0.6, 0.7, 0.8, 0.9};
  Objective objective = Objective::AoII;
  TxMode tx_mode = TxMode::OnMismatch;
  std::string out_dir = "out";

  std::set<std::string> provided;
  std::vector<std::string> warnings;

  bool has(const std::string& key) const { return provided.count(key) > 0; }

  void apply(const std::string& key, std::string_view value);
  void finalize();

  static ExperimentConfig from_string(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
};

inline void ExperimentConfig::apply(const std::string& key, std::string_view value) {
  using detail::parse_list;
  using detail::parse_number;
  if (key == "p") model.p = parse_number<double>(value, key, "a real number");
  else if (key == "mu") model.mu = parse_number<double>(value, key, "a real number");
  else if (key == "cap_e") model.cap_e = parse_number<int>(value, key, "an integer");
  else if (key == "c_s") model.c_s = parse_number<int>(value, key, "an integer");
  else if (key == "c_t") model.c_t = parse_number<int>(value, key, "an integer");
  else if (key == "n_max") model.n_max = parse_number<int>(value, key, "an integer");
  else if (key == "epsilon") solver.epsilon = parse_number<double>(value, key, "a real number");
  else if (key == "max_iters") solver.max_iters = parse_number<long>(value, key, "an integer");
  else if (key == "ref_e") solver.ref_state.e = parse_number<int>(value, key, "an integer");
  else if (key == "ref_theta") solver.ref_state.theta = parse_number<int>(value, key, "an integer");
  else if (key == "damping") solver.damping = parse_number<double>(value, key, "a real number");
  else if (key == "horizon") horizon = parse_number<long>(value, key, "an integer");
  else if (key == "replications") replications = parse_number<int>(value, key, "an integer");
  else if (key == "seed") seed = parse_number<std::uint64_t>(value, key, "an unsigned integer");
  else if (key == "burn_in") burn_in = parse_number<double>(value, key, "a real number");
  else if (key == "threads") threads = parse_number<int>(value, key, "an integer");
  else if (key == "sweep_n") sweep_n = parse_list<int>(value, key, "an integer");
  else if (key == "sweep_p") sweep_p = parse_list<double>(value, key, "a real number");
  else if (key == "out_dir") out_dir = std::string(value);
  else if (key == "objective") {
    if (value == "aoii") objective = Objective::AoII;
    else if (value == "aoi") objective = Objective::AoI;
    else throw ConfigError("key 'objective': expected aoii or aoi, got '" + std::string(value) + "'");
  } else if (key == "tx_mode") {
    if (value == "on_mismatch") tx_mode = TxMode::OnMismatch;
    else if (value == "always") tx_mode = TxMode::Always;
    else throw ConfigError("key 'tx_mode': expected on_mismatch or always, got '" +
                           std::string(value) + "'");
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
  provided.insert(key);
}

inline void ExperimentConfig::finalize() {
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(solver.epsilon > 0.0)) throw ConfigError("key 'epsilon': must be > 0");
  if (solver.max_iters < 1) throw ConfigError("key 'max_iters': must be >= 1");
  if (!(solver.damping >= 0.0) || !(solver.damping < 1.0))
    throw ConfigError("key 'damping': must lie in [0, 1)");
  if (solver.ref_state.e < 0 || solver.ref_state.e > model.cap_e)
    throw ConfigError("key 'ref_e': outside 0.." + std::to_string(model.cap_e));
  if (solver.ref_state.theta < 1 || solver.ref_state.theta > model.n_max)
    throw ConfigError("key 'ref_theta': outside 1.." + std::to_string(model.n_max));
  if (horizon < 10'000) throw ConfigError("key 'horizon': must be >= 10000");
  if (replications < 1) throw ConfigError("key 'replications': must be >= 1");
  if (!(burn_in >= 0.0) || !(burn_in <= 0.5)) throw ConfigError("key 'burn_in': must lie in [0, 0.5]");
  if (threads < 1 || threads > 256) throw ConfigError("key 'threads': must lie in 1..256");
  if (out_dir.empty()) throw ConfigError("key 'out_dir': must not be empty");
  for (int n : sweep_n) {
    ModelParams probe = model;
    probe.n_max = n;
    try {
      probe.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("key 'sweep_n': value " + std::to_string(n) + " invalid: " + e.what());
    }
  }
  for (double p : sweep_p) {
    ModelParams probe = model;
    probe.p = p;
    try {
      probe.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("key 'sweep_p': value " + std::to_string(p) + " invalid: " + e.what());
    }
  }
  if (!model.act_ever_feasible())
    warnings.push_back("acting costs " + std::to_string(model.act_cost()) +
                       " energy but the battery holds " + std::to_string(model.cap_e) +
                       "; every policy is forced idle");
}

inline ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv(line);
    if (std::size_t hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = detail::trim(sv);
    if (sv.empty()) continue;
    std::size_t eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value, got '" +
                        std::string(sv) + "'");
    std::string key(detail::trim(sv.substr(0, eq)));
    std::string_view value = detail::trim(sv.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    try {
      cfg.apply(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.finalize();
  return cfg;
}

inline ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

}  // namespace aoii
