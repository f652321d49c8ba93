#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "aoii/mdp.hpp"

namespace aoii {

// Deterministic stationary policy: one action per state index.
struct PolicyTable {
  std::vector<Action> choice;
};

// Stationary randomized policy: probability of acting per state index.
struct RandomizedPolicy {
  std::vector<double> act_prob;
};

// Markov chain induced on the MDP state space by fixing a policy (or by
// pooling all feasible actions, for reachability analysis).
struct InducedChain {
  int n_states = 0;
  bool stochastic = true;  // union chains only carry reachability
  std::vector<std::vector<Transition>> rows;
};

struct StateClass {
  std::vector<int> states;
  bool recurrent = false;
};

struct ClassDecomposition {
  std::vector<StateClass> classes;  // ordered by smallest contained state
  std::vector<int> class_of;

  int recurrent_count() const {
    int n = 0;
    for (const auto& c : classes) n += c.recurrent ? 1 : 0;
    return n;
  }
};

inline InducedChain induce_chain(const MdpKernel& k, const PolicyTable& pol) {
  if (pol.choice.size() != std::size_t(k.n_states))
    throw std::invalid_argument("induce_chain: policy covers " +
                                std::to_string(pol.choice.size()) + " of " +
                                std::to_string(k.n_states) + " states");
  InducedChain c;
  c.n_states = k.n_states;
  c.rows.reserve(std::size_t(k.n_states));
  for (int s = 0; s < k.n_states; ++s)
    c.rows.push_back(k.row(s, pol.choice[std::size_t(s)]));  // throws on infeasible act
  return c;
}

inline InducedChain induce_chain(const MdpKernel& k, const RandomizedPolicy& pol) {
  if (pol.act_prob.size() != std::size_t(k.n_states))
    throw std::invalid_argument("induce_chain: randomized policy size mismatch");
  InducedChain c;
  c.n_states = k.n_states;
  c.rows.resize(std::size_t(k.n_states));
  for (int s = 0; s < k.n_states; ++s) {
    double w = pol.act_prob[std::size_t(s)];
    if (!(w >= 0.0) || !(w <= 1.0))
      throw std::invalid_argument("induce_chain: act_prob outside [0, 1] at state " +
                                  std::to_string(s));
    if (w > 0.0 && !k.act_feasible_at(s))
      throw std::invalid_argument("induce_chain: positive act weight at infeasible state " +
                                  std::to_string(s));
    std::vector<Transition> row;
    for (const Transition& t : k.idle_rows[std::size_t(s)])
      row.push_back({t.next, (1.0 - w) * t.prob});
    if (w > 0.0)
      for (const Transition& t : k.act_rows[std::size_t(s)])
        row.push_back({t.next, w * t.prob});
    c.rows[std::size_t(s)] = detail::merge_row(std::move(row));
  }
  return c;
}

// Edge-union of every feasible action's row. Probabilities are pooled mass,
// not a distribution; only the support matters downstream.
inline InducedChain union_chain(const MdpKernel& k) {
  InducedChain c;
  c.n_states = k.n_states;
  c.stochastic = false;
  c.rows.resize(std::size_t(k.n_states));
  for (int s = 0; s < k.n_states; ++s) {
    std::vector<Transition> row = k.idle_rows[std::size_t(s)];
    for (const Transition& t : k.act_rows[std::size_t(s)]) row.push_back(t);
    c.rows[std::size_t(s)] = detail::merge_row(std::move(row));
  }
  return c;
}

// Strongly connected components via Tarjan's algorithm with an explicit
// stack, so deep transient chains cannot overflow the call stack. A class is
// recurrent iff no edge leaves it.
inline ClassDecomposition decompose(const InducedChain& chain) {
  const int n = chain.n_states;
  if (n <= 0) throw std::invalid_argument("decompose: empty chain");

  std::vector<int> index(std::size_t(n), -1), lowlink(std::size_t(n), 0);
  std::vector<bool> on_stack(std::size_t(n), false);
  std::vector<int> stack;
  std::vector<int> comp_of(std::size_t(n), -1);
  int next_index = 0, n_comps = 0;

  struct Frame {
    int v;
    std::size_t edge;
  };
  std::vector<Frame> call;

  for (int root = 0; root < n; ++root) {
    if (index[std::size_t(root)] != -1) continue;
    call.push_back({root, 0});
    while (!call.empty()) {
      Frame& f = call.back();
      int v = f.v;
      if (f.edge == 0) {
        index[std::size_t(v)] = lowlink[std::size_t(v)] = next_index++;
        stack.push_back(v);
        on_stack[std::size_t(v)] = true;
      }
      const auto& row = chain.rows[std::size_t(v)];
      bool descended = false;
      while (f.edge < row.size()) {
        int w = row[f.edge].next;
        ++f.edge;
        if (index[std::size_t(w)] == -1) {
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[std::size_t(w)])
          lowlink[std::size_t(v)] = std::min(lowlink[std::size_t(v)], index[std::size_t(w)]);
      }
      if (descended) continue;
      if (lowlink[std::size_t(v)] == index[std::size_t(v)]) {
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on_stack[std::size_t(w)] = false;
          comp_of[std::size_t(w)] = n_comps;
          if (w == v) break;
        }
        ++n_comps;
      }
      call.pop_back();
      if (!call.empty()) {
        int parent = call.back().v;
        lowlink[std::size_t(parent)] =
            std::min(lowlink[std::size_t(parent)], lowlink[std::size_t(v)]);
      }
    }
  }

  std::vector<StateClass> classes(static_cast<std::size_t>(n_comps));
  for (int s = 0; s < n; ++s) classes[std::size_t(comp_of[std::size_t(s)])].states.push_back(s);
  for (auto& c : classes) {
    c.recurrent = true;
    for (int s : c.states)
      for (const Transition& t : chain.rows[std::size_t(s)])
        if (comp_of[std::size_t(t.next)] != comp_of[std::size_t(s)]) c.recurrent = false;
  }
  std::sort(classes.begin(), classes.end(), [](const StateClass& a, const StateClass& b) {
    return a.states.front() < b.states.front();
  });

  ClassDecomposition d;
  d.classes = std::move(classes);
  d.class_of.assign(std::size_t(n), -1);
  for (std::size_t ci = 0; ci < d.classes.size(); ++ci)
    for (int s : d.classes[ci].states) d.class_of[std::size_t(s)] = int(ci);
  return d;
}

struct CommunicatingReport {
  bool communicating = false;
  ClassDecomposition decomposition;
};

// A model is communicating when some policy can take any state to any other;
// equivalently the union of feasible-action edges forms one strongly
// connected component.
inline CommunicatingReport is_communicating(const ModelParams& m) {
  MdpKernel k = build_kernel(m);
  CommunicatingReport r;
  r.decomposition = decompose(union_chain(k));
  r.communicating = r.decomposition.classes.size() == 1;
  return r;
}

}  // namespace aoii
