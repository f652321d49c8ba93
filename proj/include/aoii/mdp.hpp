#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "aoii/belief.hpp"
#include "aoii/model.hpp"

namespace aoii {

// Which per-slot cost the controller minimizes.
enum class Objective { AoII, AoI };

// Whether a fresh sample is transmitted only when it contradicts the
// receiver's estimate, or unconditionally.
enum class TxMode { OnMismatch, Always };

inline const char* to_string(Objective o) { return o == Objective::AoII ? "aoii" : "aoi"; }
inline const char* to_string(TxMode t) { return t == TxMode::OnMismatch ? "on_mismatch" : "always"; }

struct Transition {
  int next = 0;
  double prob = 0.0;
};

// Expected age of incorrect information carried by a state of age theta.
inline double expected_aoii_cost(int theta, const ModelParams& m) {
  return belief_from_aoi(theta, m).expected_aoii();
}

// Finite-state average-cost MDP over (battery, age) pairs. Rows are sorted by
// destination index with duplicate destinations merged; act_rows[s] is empty
// where acting is infeasible.
struct MdpKernel {
  ModelParams params;
  Objective objective = Objective::AoII;
  TxMode tx_mode = TxMode::OnMismatch;
  int n_states = 0;
  std::vector<double> cost;
  std::vector<std::vector<Transition>> idle_rows;
  std::vector<std::vector<Transition>> act_rows;

  bool act_feasible_at(int s) const { return !act_rows[std::size_t(s)].empty(); }

  const std::vector<Transition>& row(int s, Action a) const {
    if (a == Action::Idle) return idle_rows[std::size_t(s)];
    const auto& r = act_rows[std::size_t(s)];
    if (r.empty())
      throw std::logic_error("kernel row: act infeasible at state " + std::to_string(s));
    return r;
  }
};

namespace detail {
inline std::vector<Transition> merge_row(std::vector<Transition> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Transition& a, const Transition& b) { return a.next < b.next; });
  std::vector<Transition> out;
  for (const Transition& t : entries) {
    if (t.prob == 0.0) continue;  // keep degenerate mu/p corners free of phantom edges
    if (!out.empty() && out.back().next == t.next)
      out.back().prob += t.prob;
    else
      out.push_back(t);
  }
  return out;
}
}  // namespace detail

inline MdpKernel build_kernel(const ModelParams& m, Objective obj = Objective::AoII,
                              TxMode tx = TxMode::OnMismatch) {
  m.validate();
  MdpKernel k;
  k.params = m;
  k.objective = obj;
  k.tx_mode = tx;
  k.n_states = m.n_states();
  k.cost.resize(std::size_t(k.n_states));
  k.idle_rows.resize(std::size_t(k.n_states));
  k.act_rows.resize(std::size_t(k.n_states));

  for (int s = 0; s < k.n_states; ++s) {
    MdpState st = state_from_index(s, m);
    k.cost[std::size_t(s)] =
        obj == Objective::AoII ? expected_aoii_cost(st.theta, m) : double(st.theta);

    int theta_idle = std::min(st.theta + 1, m.n_max);
    std::vector<Transition> idle;
    idle.push_back({state_index({std::min(st.e + 1, m.cap_e), theta_idle}, m), m.mu});
    idle.push_back({state_index({st.e, theta_idle}, m), 1.0 - m.mu});
    k.idle_rows[std::size_t(s)] = detail::merge_row(std::move(idle));

    if (!act_feasible(st, m)) continue;
    // A sample matching the estimate skips the transmission and its cost;
    // either way the controller is back in sync up to the one-slot delay.
    double match = tx == TxMode::OnMismatch ? g(st.theta, m.p) : 0.0;
    std::vector<Transition> act;
    for (auto [drain, pr] : {std::pair{m.c_s, match}, std::pair{m.act_cost(), 1.0 - match}}) {
      if (pr == 0.0) continue;
      act.push_back({state_index({std::min(st.e - drain + 1, m.cap_e), 1}, m), pr * m.mu});
      act.push_back({state_index({st.e - drain, 1}, m), pr * (1.0 - m.mu)});
    }
    k.act_rows[std::size_t(s)] = detail::merge_row(std::move(act));
  }
  return k;
}

}  // namespace aoii
