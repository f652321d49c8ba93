#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "aoii/chain_analysis.hpp"
#include "aoii/mdp.hpp"

namespace aoii {

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
  // 53-bit mantissa draw; identical on every platform, unlike
  // std::uniform_real_distribution.
  return double(rng() >> 11) * 0x1.0p-53;
}

inline std::mt19937_64 replication_rng(std::uint64_t seed, std::uint32_t replication) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), replication, 0x9E3779B9u};
  return std::mt19937_64(seq);
}

// Run fn(i) for i in 0..count-1 on up to n_threads workers. Results must be
// written to preallocated slots keyed by i so the schedule cannot leak into
// the output.
template <typename Fn>
inline void parallel_for_indexed(int count, int n_threads, Fn&& fn) {
  int workers = std::min(n_threads, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace detail

// Ground-truth world state. x is the source, x_hat the receiver's estimate,
// delta the age of incorrect information t - V(t) where V(t) is the last slot
// whose source value the estimate still matches.
struct SimulatorState {
  int x = 0;
  int x_hat = 0;
  int e = 0;
  int theta = 1;
  long delta = 0;
  long t = 0;
  std::mt19937_64 rng;
};

struct StepOutcome {
  Action action = Action::Idle;
  bool transmitted = false;
};

// Advance one slot. Order inside the slot: the controller reads (e, theta)
// and picks an action, energy drains then harvests, the source moves, and a
// transmission sent this slot is delivered before the next readout.
inline StepOutcome step(SimulatorState& s, const PolicyTable& pol, const ModelParams& m,
                        TxMode tx = TxMode::OnMismatch) {
  int idx = state_index({s.e, s.theta}, m);
  Action a = pol.choice[std::size_t(idx)];

  StepOutcome out;
  out.action = a;
  int drain = 0;
  bool deliver = false;
  int sampled = s.x;
  if (a == Action::Act) {
    deliver = true;  // a skipped transmission still certifies the estimate
    out.transmitted = tx == TxMode::Always || sampled != s.x_hat;
    drain = out.transmitted ? m.act_cost() : m.c_s;
  }
  if (drain > s.e)
    throw std::logic_error("simulator: drain " + std::to_string(drain) +
                           " exceeds battery " + std::to_string(s.e));

  bool harvest = detail::uniform01(s.rng) < m.mu;
  s.e = std::min(s.e - drain + (harvest ? 1 : 0), m.cap_e);

  bool flip = detail::uniform01(s.rng) >= m.p;
  if (flip) s.x ^= 1;

  if (deliver) {
    s.x_hat = sampled;
    s.theta = 1;
  } else {
    s.theta = std::min(s.theta + 1, m.n_max);
  }

  if (s.x == s.x_hat)
    s.delta = 0;
  else if (deliver)
    s.delta = 1;  // the delivered sample matched the source one slot ago
  else
    s.delta += 1;

  s.t += 1;
  return out;
}

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  double half_width = 0.0;
};

struct SimMetrics {
  Estimate avg_aoii;
  Estimate avg_aoi;
  Estimate real_time_error;  // fraction of slots with x != x_hat
  Estimate action_rate;
  Estimate transmit_rate;
  Estimate mean_energy;
  long slots_scored = 0;
  int replications = 0;
  int batches_per_replication = 0;
};

struct SimOptions {
  long horizon = 1'000'000;
  int replications = 5;
  std::uint64_t seed = 12345;
  double burn_in = 0.01;
  int threads = 1;
  TxMode tx_mode = TxMode::OnMismatch;
};

namespace detail {

constexpr int kBatches = 32;
constexpr int kMetricCount = 6;

struct BatchRow {
  double v[kMetricCount] = {0, 0, 0, 0, 0, 0};
};

inline Estimate pool(const std::vector<BatchRow>& rows, int metric) {
  double mean = 0.0;
  for (const BatchRow& r : rows) mean += r.v[metric];
  mean /= double(rows.size());
  double ss = 0.0;
  for (const BatchRow& r : rows) {
    double d = r.v[metric] - mean;
    ss += d * d;
  }
  double se = rows.size() > 1
                  ? std::sqrt(ss / double(rows.size() - 1) / double(rows.size()))
                  : 0.0;
  return Estimate{mean, se, 1.96 * se};
}

}  // namespace detail

// Monte Carlo estimate of the long-run metrics of a fixed policy. Each
// replication runs an independent substream; per-replication means are split
// into 32 batches and the standard error is taken across all batch means, so
// results are identical for any thread count.
inline SimMetrics run_simulation(const PolicyTable& pol, const ModelParams& m,
                                 const SimOptions& opt) {
  m.validate();
  if (pol.choice.size() != std::size_t(m.n_states()))
    throw std::invalid_argument("run_simulation: policy size mismatch");
  if (opt.horizon < 10'000)
    throw std::invalid_argument("run_simulation: horizon must be >= 10000");
  if (opt.replications < 1)
    throw std::invalid_argument("run_simulation: replications must be >= 1");
  if (!(opt.burn_in >= 0.0) || !(opt.burn_in <= 0.5))
    throw std::invalid_argument("run_simulation: burn_in must lie in [0, 0.5]");
  if (opt.threads < 1) throw std::invalid_argument("run_simulation: threads must be >= 1");
  for (std::size_t s = 0; s < pol.choice.size(); ++s)
    if (pol.choice[s] == Action::Act &&
        !act_feasible(state_from_index(int(s), m), m))
      throw std::invalid_argument("run_simulation: policy acts at infeasible state " +
                                  std::to_string(s));

  const long burn = std::lround(opt.burn_in * double(opt.horizon));
  const long batch_len = (opt.horizon - burn) / detail::kBatches;
  if (batch_len < 1)
    throw std::invalid_argument("run_simulation: horizon too short for burn-in");

  std::vector<detail::BatchRow> rows(std::size_t(opt.replications) * detail::kBatches);
  detail::parallel_for_indexed(opt.replications, opt.threads, [&](int r) {
    SimulatorState st;
    st.rng = detail::replication_rng(opt.seed, std::uint32_t(r));
    for (long k = 0; k < burn; ++k) step(st, pol, m, opt.tx_mode);
    for (int b = 0; b < detail::kBatches; ++b) {
      double acc[detail::kMetricCount] = {0, 0, 0, 0, 0, 0};
      for (long k = 0; k < batch_len; ++k) {
        StepOutcome o = step(st, pol, m, opt.tx_mode);
        acc[0] += double(st.delta);
        acc[1] += double(st.theta);
        acc[2] += st.x != st.x_hat ? 1.0 : 0.0;
        acc[3] += o.action == Action::Act ? 1.0 : 0.0;
        acc[4] += o.transmitted ? 1.0 : 0.0;
        acc[5] += double(st.e);
      }
      detail::BatchRow& row = rows[std::size_t(r) * detail::kBatches + std::size_t(b)];
      for (int i = 0; i < detail::kMetricCount; ++i) row.v[i] = acc[i] / double(batch_len);
    }
  });

  SimMetrics out;
  out.avg_aoii = detail::pool(rows, 0);
  out.avg_aoi = detail::pool(rows, 1);
  out.real_time_error = detail::pool(rows, 2);
  out.action_rate = detail::pool(rows, 3);
  out.transmit_rate = detail::pool(rows, 4);
  out.mean_energy = detail::pool(rows, 5);
  out.slots_scored = batch_len * detail::kBatches * opt.replications;
  out.replications = opt.replications;
  out.batches_per_replication = detail::kBatches;
  return out;
}

struct TraceRow {
  long t = 0;
  int x = 0, x_hat = 0, e = 0, theta = 0;
  long delta = 0;
  int action = 0, transmitted = 0;
};

// Slot-by-slot log of replication 0 of run_simulation with the same seed,
// without burn-in. Row k holds the state after slot k and the decision taken
// in it.
inline std::vector<TraceRow> trace_simulation(const PolicyTable& pol, const ModelParams& m,
                                              long horizon, std::uint64_t seed,
                                              TxMode tx = TxMode::OnMismatch) {
  m.validate();
  if (horizon < 1) throw std::invalid_argument("trace_simulation: horizon must be >= 1");
  SimulatorState st;
  st.rng = detail::replication_rng(seed, 0);
  std::vector<TraceRow> out;
  out.reserve(std::size_t(horizon));
  for (long k = 0; k < horizon; ++k) {
    StepOutcome o = step(st, pol, m, tx);
    out.push_back({st.t, st.x, st.x_hat, st.e, st.theta, st.delta,
                   o.action == Action::Act ? 1 : 0, o.transmitted ? 1 : 0});
  }
  return out;
}

}  // namespace aoii
