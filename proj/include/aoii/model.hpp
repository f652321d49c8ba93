#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace aoii {

enum class Action : int { Idle = 0, Act = 1 };

inline const char* to_string(Action a) { return a == Action::Act ? "act" : "idle"; }

// Binary symmetric source over an energy-harvesting link.
// p: per-slot probability the source keeps its value, mu: energy arrival
// probability, cap_e: battery capacity, c_s/c_t: sampling and transmission
// cost in energy units, n_max: truncation bound on the age of the last sample.
struct ModelParams {
  double p = 0.7;
  double mu = 0.5;
  int cap_e = 10;
  int c_s = 1;
  int c_t = 1;
  int n_max = 20;

  int n_states() const { return (cap_e + 1) * n_max; }
  int act_cost() const { return c_s + c_t; }
  bool act_ever_feasible() const { return act_cost() <= cap_e; }
  void validate() const;
};

inline void ModelParams::validate() const {
  if (!(p > 0.5) || !(p <= 1.0) || !std::isfinite(p))
    throw std::invalid_argument("p must lie in (0.5, 1], got " + std::to_string(p));
  if (!(mu >= 0.0) || !(mu <= 1.0) || !std::isfinite(mu))
    throw std::invalid_argument("mu must lie in [0, 1], got " + std::to_string(mu));
  if (cap_e < 1)
    throw std::invalid_argument("cap_e must be >= 1, got " + std::to_string(cap_e));
  if (c_s < 0 || c_t < 0)
    throw std::invalid_argument("energy costs must be non-negative");
  if (act_cost() < 1)
    throw std::invalid_argument("c_s + c_t must be >= 1");
  if (n_max < 2)
    throw std::invalid_argument("n_max must be >= 2, got " + std::to_string(n_max));
}

// State of the decision process: battery level e in 0..cap_e and age of the
// newest delivered sample theta in 1..n_max.
struct MdpState {
  int e = 0;
  int theta = 1;
  bool operator==(const MdpState&) const = default;
};

// q^n by repeated squaring. Results below 1e-300 flush to zero so that deep
// powers cannot produce subnormals.
inline double pow_int(double q, long n) {
  if (n < 0) throw std::invalid_argument("pow_int: negative exponent");
  double result = 1.0;
  double base = q;
  for (long k = n; k > 0; k >>= 1) {
    if (k & 1) result *= base;
    base *= base;
  }
  if (std::abs(result) < 1e-300) return 0.0;
  return result;
}

// Probability that the estimate still matches the source n slots after a
// synchronizing sample: 0.5 * (1 + (2p-1)^n). g(0) = 1 and g(1) = p exactly.
inline double g(long n, double p) {
  if (n < 0) throw std::invalid_argument("g: n must be >= 0");
  if (!(p > 0.5) || !(p <= 1.0))
    throw std::invalid_argument("g: p must lie in (0.5, 1]");
  return 0.5 * (1.0 + pow_int(2.0 * p - 1.0, n));
}

// Row-major state enumeration: index = e * n_max + (theta - 1).
inline int state_index(MdpState s, const ModelParams& m) {
  if (s.e < 0 || s.e > m.cap_e)
    throw std::out_of_range("state_index: e=" + std::to_string(s.e) +
                            " outside 0.." + std::to_string(m.cap_e));
  if (s.theta < 1 || s.theta > m.n_max)
    throw std::out_of_range("state_index: theta=" + std::to_string(s.theta) +
                            " outside 1.." + std::to_string(m.n_max));
  return s.e * m.n_max + (s.theta - 1);
}

inline MdpState state_from_index(int idx, const ModelParams& m) {
  if (idx < 0 || idx >= m.n_states())
    throw std::out_of_range("state_from_index: " + std::to_string(idx));
  return MdpState{idx / m.n_max, idx % m.n_max + 1};
}

inline bool act_feasible(MdpState s, const ModelParams& m) {
  return s.e >= m.act_cost();
}

inline std::vector<Action> feasible_actions(MdpState s, const ModelParams& m) {
  std::vector<Action> out{Action::Idle};
  if (act_feasible(s, m)) out.push_back(Action::Act);
  return out;
}

}  // namespace aoii
