#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoii/chain_analysis.hpp"
#include "aoii/mdp.hpp"

namespace aoii {

struct RviOptions {
  double epsilon = 1e-9;
  long max_iters = 1'000'000;
  MdpState ref_state{0, 1};
  // Weight on staying put, blended into every row. Preserves the average
  // cost while breaking periodicity; 0 disables the blend.
  double damping = 0.0;
};

class SolveError : public std::runtime_error {
 public:
  long iterations;
  double residual_span;
  SolveError(long iters, double span)
      : std::runtime_error("relative value iteration did not converge after " +
                           std::to_string(iters) + " sweeps, span " + std::to_string(span)),
        iterations(iters),
        residual_span(span) {}
};

struct SolveResult {
  double gain = 0.0;
  std::vector<double> values;
  PolicyTable policy;
  long iterations = 0;
  double residual_span = 0.0;
};

// Relative value iteration with synchronous sweeps:
//   V' = T V - V(ref) * 1,
// stopping once the span of T V - V drops below epsilon. At the fixed point
// V(ref) equals the optimal average cost. Ties prefer Idle.
inline SolveResult rvi_solve(const MdpKernel& k, const RviOptions& opt = {}) {
  if (!(opt.epsilon > 0.0)) throw std::invalid_argument("rvi_solve: epsilon must be > 0");
  if (opt.max_iters < 1) throw std::invalid_argument("rvi_solve: max_iters must be >= 1");
  if (!(opt.damping >= 0.0) || !(opt.damping < 1.0))
    throw std::invalid_argument("rvi_solve: damping must lie in [0, 1)");
  const int n = k.n_states;
  const int ref = state_index(opt.ref_state, k.params);
  const double d = opt.damping;

  std::vector<double> v(std::size_t(n), 0.0), tv(std::size_t(n), 0.0);
  PolicyTable pol;
  pol.choice.assign(std::size_t(n), Action::Idle);

  auto backup = [&](int s, Action a) {
    double acc = 0.0;
    for (const Transition& t : k.row(s, a)) acc += t.prob * v[std::size_t(t.next)];
    return k.cost[std::size_t(s)] + d * v[std::size_t(s)] + (1.0 - d) * acc;
  };

  double span = std::numeric_limits<double>::infinity();
  for (long iter = 1; iter <= opt.max_iters; ++iter) {
    for (int s = 0; s < n; ++s) {
      double q = backup(s, Action::Idle);
      Action best = Action::Idle;
      if (k.act_feasible_at(s)) {
        double qa = backup(s, Action::Act);
        if (qa < q) {
          q = qa;
          best = Action::Act;
        }
      }
      tv[std::size_t(s)] = q;
      pol.choice[std::size_t(s)] = best;
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int s = 0; s < n; ++s) {
      double delta = tv[std::size_t(s)] - v[std::size_t(s)];
      lo = std::min(lo, delta);
      hi = std::max(hi, delta);
    }
    span = hi - lo;
    double shift = v[std::size_t(ref)];
    for (int s = 0; s < n; ++s) v[std::size_t(s)] = tv[std::size_t(s)] - shift;
    if (span < opt.epsilon)
      return SolveResult{v[std::size_t(ref)], std::move(v), std::move(pol), iter, span};
  }
  throw SolveError(opt.max_iters, span);
}

// Long-run average cost of a fixed policy from a given start state, computed
// from the stationary distribution of the induced chain. Requires exactly one
// recurrent class reachable from the start.
inline double evaluate_policy_exact(const MdpKernel& k, const PolicyTable& pol, MdpState start) {
  InducedChain chain = induce_chain(k, pol);
  const int n = chain.n_states;
  const int s0 = state_index(start, k.params);

  std::vector<bool> reachable(std::size_t(n), false);
  std::deque<int> queue{s0};
  reachable[std::size_t(s0)] = true;
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    for (const Transition& t : chain.rows[std::size_t(s)])
      if (!reachable[std::size_t(t.next)]) {
        reachable[std::size_t(t.next)] = true;
        queue.push_back(t.next);
      }
  }

  ClassDecomposition dec = decompose(chain);
  const StateClass* target = nullptr;
  int hits = 0;
  for (const StateClass& c : dec.classes) {
    if (!c.recurrent || !reachable[std::size_t(c.states.front())]) continue;
    ++hits;
    target = &c;
  }
  if (hits != 1)
    throw std::runtime_error("evaluate_policy_exact: " + std::to_string(hits) +
                             " recurrent classes reachable from (" + std::to_string(start.e) +
                             ", " + std::to_string(start.theta) + "); average cost undefined");

  const std::vector<int>& cls = target->states;
  const int m = int(cls.size());
  std::vector<int> local(std::size_t(n), -1);
  for (int i = 0; i < m; ++i) local[std::size_t(cls[std::size_t(i)])] = i;

  // pi^T P = pi^T, sum pi = 1: replace the first balance equation with the
  // normalization row and solve the dense system.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (const Transition& t : chain.rows[std::size_t(cls[std::size_t(i)])]) {
      int j = local[std::size_t(t.next)];
      if (j < 0)
        throw std::logic_error("evaluate_policy_exact: recurrent class not closed");
      a(j, i) += t.prob;
    }
    a(i, i) -= 1.0;
  }
  a.row(0).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  b(0) = 1.0;
  Eigen::VectorXd pi = a.partialPivLu().solve(b);

  double norm_err = std::abs(pi.sum() - 1.0);
  double balance_err = 0.0;
  Eigen::VectorXd flow = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i)
    for (const Transition& t : chain.rows[std::size_t(cls[std::size_t(i)])])
      flow(local[std::size_t(t.next)]) += t.prob * pi(i);
  for (int j = 0; j < m; ++j) {
    balance_err = std::max(balance_err, std::abs(flow(j) - pi(j)));
    if (pi(j) < -1e-12)
      throw std::runtime_error("evaluate_policy_exact: negative stationary mass " +
                               std::to_string(pi(j)));
  }
  if (norm_err > 1e-8 || balance_err > 1e-8)
    throw std::runtime_error("evaluate_policy_exact: stationary solve residual " +
                             std::to_string(std::max(norm_err, balance_err)));

  double cost = 0.0;
  for (int i = 0; i < m; ++i) cost += pi(i) * k.cost[std::size_t(cls[std::size_t(i)])];
  return cost;
}

struct OracleResult {
  double gain = 0.0;
  PolicyTable policy;
};

// Exhaustive minimum over all feasible deterministic policies. Exponential in
// the number of act-feasible states, so only tiny instances are accepted.
inline OracleResult enumerate_policies_oracle(const MdpKernel& k, MdpState start) {
  if (k.n_states > 12)
    throw std::invalid_argument("enumerate_policies_oracle: " + std::to_string(k.n_states) +
                                " states exceeds the 12-state bound");
  std::vector<int> actable;
  for (int s = 0; s < k.n_states; ++s)
    if (k.act_feasible_at(s)) actable.push_back(s);

  OracleResult best;
  best.gain = std::numeric_limits<double>::infinity();
  for (unsigned long mask = 0; mask < (1ul << actable.size()); ++mask) {
    PolicyTable pol;
    pol.choice.assign(std::size_t(k.n_states), Action::Idle);
    for (std::size_t i = 0; i < actable.size(); ++i)
      if (mask >> i & 1) pol.choice[std::size_t(actable[i])] = Action::Act;
    double cost = evaluate_policy_exact(k, pol, start);
    if (cost < best.gain) {
      best.gain = cost;
      best.policy = std::move(pol);
    }
  }
  return best;
}

}  // namespace aoii
