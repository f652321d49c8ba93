#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aoii/config.hpp"
#include "aoii/io.hpp"

namespace aoii {

namespace detail {
inline std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}
}  // namespace detail

// Solve the configured model and write the optimal policy with its relative
// values. with_oracle additionally brute-forces every deterministic policy,
// which only tiny instances permit.
inline json cmd_solve(const ExperimentConfig& cfg, bool with_oracle = false) {
  MdpKernel kernel = build_kernel(cfg.model, cfg.objective, cfg.tx_mode);
  if (with_oracle && kernel.n_states > 12)
    throw ConfigError("--oracle brute-forces every policy and needs at most 12 states, got " +
                      std::to_string(kernel.n_states));
  SolveResult res = rvi_solve(kernel, cfg.solver);

  write_text(detail::out_path(cfg, "policy.csv"), policy_csv(kernel, res.policy, &res.values));

  int act_states = 0;
  for (Action a : res.policy.choice) act_states += a == Action::Act ? 1 : 0;

  json summary{{"command", "solve"},
               {"params", params_json(cfg.model)},
               {"objective", to_string(cfg.objective)},
               {"tx_mode", to_string(cfg.tx_mode)},
               {"gain", res.gain},
               {"iterations", res.iterations},
               {"residual_span", res.residual_span},
               {"epsilon", cfg.solver.epsilon},
               {"ref", json::array({cfg.solver.ref_state.e, cfg.solver.ref_state.theta})},
               {"damping", cfg.solver.damping},
               {"n_states", kernel.n_states},
               {"act_states", act_states}};
  if (with_oracle) {
    OracleResult oracle = enumerate_policies_oracle(kernel, cfg.solver.ref_state);
    summary["oracle_gain"] = oracle.gain;
    summary["oracle_abs_diff"] = std::abs(oracle.gain - res.gain);
  }

  // file lists stay relative to out_dir so reruns into different directories
  // produce byte-identical artifacts
  summary["files"] = json::array({"policy.csv", "solve_summary.json"});
  write_text(detail::out_path(cfg, "solve_summary.json"), summary.dump(2) + "\n");
  return summary;
}

// Gain as a function of the age truncation bound. Defaults to the sparse
// harvesting regime (mu = 0.3) unless the config pins mu, since saturation
// effects show up there before they do at mu = 0.5.
inline json cmd_sweep_n(const ExperimentConfig& cfg) {
  ModelParams base = cfg.model;
  if (!cfg.has("mu")) base.mu = 0.3;

  std::vector<int> points = cfg.sweep_n;
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  for (int n : points)
    if (cfg.solver.ref_state.theta > n)
      throw ConfigError("key 'ref_theta': " + std::to_string(cfg.solver.ref_state.theta) +
                        " exceeds swept n_max " + std::to_string(n));

  struct Row {
    int n_max;
    double gain;
    long iterations;
  };
  std::vector<Row> rows(points.size());
  detail::parallel_for_indexed(int(points.size()), cfg.threads, [&](int i) {
    ModelParams m = base;
    m.n_max = points[std::size_t(i)];
    SolveResult res = rvi_solve(build_kernel(m, cfg.objective, cfg.tx_mode), cfg.solver);
    rows[std::size_t(i)] = {m.n_max, res.gain, res.iterations};
  });

  std::string csv = "n_max,gain,iterations\n";
  json jrows = json::array();
  for (const Row& r : rows) {
    csv += std::to_string(r.n_max) + "," + fmt(r.gain) + "," + std::to_string(r.iterations) + "\n";
    jrows.push_back(json{{"n_max", r.n_max}, {"gain", r.gain}, {"iterations", r.iterations}});
  }
  write_text(detail::out_path(cfg, "sweep_n.csv"), csv);

  json summary{{"command", "sweep-n"},
               {"params", params_json(base)},
               {"objective", to_string(cfg.objective)},
               {"tx_mode", to_string(cfg.tx_mode)},
               {"rows", std::move(jrows)},
               {"files", json::array({"sweep_n.csv", "sweep_n.json"})}};
  write_text(detail::out_path(cfg, "sweep_n.json"), summary.dump(2) + "\n");
  return summary;
}

// Semantics-aware controller against a freshness-only baseline that transmits
// every sample, across a list of source persistence values. Both sides are
// solved exactly, then simulated with paired seeds; the headline metric is
// the fraction of slots the receiver's estimate is wrong.
inline json cmd_compare(const ExperimentConfig& cfg) {
  json jrows = json::array();
  std::string csv =
      "p,gain_aoii,rte_aoii,rte_aoii_se,rte_aoii_hw,gain_aoi,rte_aoi,rte_aoi_se,rte_aoi_hw,gap,"
      "ci_separated\n";

  for (double p : cfg.sweep_p) {
    ModelParams m = cfg.model;
    m.p = p;

    SolveResult aoii = rvi_solve(build_kernel(m, Objective::AoII, TxMode::OnMismatch), cfg.solver);
    SolveResult aoi = rvi_solve(build_kernel(m, Objective::AoI, TxMode::Always), cfg.solver);

    SimOptions so;
    so.horizon = cfg.horizon;
    so.replications = cfg.replications;
    so.seed = cfg.seed;
    so.burn_in = cfg.burn_in;
    so.threads = cfg.threads;
    so.tx_mode = TxMode::OnMismatch;
    SimMetrics sim_aoii = run_simulation(aoii.policy, m, so);
    so.tx_mode = TxMode::Always;
    SimMetrics sim_aoi = run_simulation(aoi.policy, m, so);

    const Estimate& ra = sim_aoii.real_time_error;
    const Estimate& rb = sim_aoi.real_time_error;
    double gap = rb.mean - ra.mean;
    bool separated = rb.mean - rb.half_width > ra.mean + ra.half_width;

    csv += fmt(p) + "," + fmt(aoii.gain) + "," + fmt(ra.mean) + "," + fmt(ra.se) + "," +
           fmt(ra.half_width) + "," + fmt(aoi.gain) + "," + fmt(rb.mean) + "," + fmt(rb.se) + "," +
           fmt(rb.half_width) + "," + fmt(gap) + "," + (separated ? "1" : "0") + "\n";
    jrows.push_back(json{{"p", p},
                         {"gain_aoii", aoii.gain},
                         {"aoii", metrics_json(sim_aoii)},
                         {"gain_aoi", aoi.gain},
                         {"aoi", metrics_json(sim_aoi)},
                         {"gap", gap},
                         {"ci_separated", separated}});
  }

  write_text(detail::out_path(cfg, "compare.csv"), csv);
  json summary{{"command", "compare"},
               {"params", params_json(cfg.model)},
               {"horizon", cfg.horizon},
               {"replications", cfg.replications},
               {"seed", cfg.seed},
               {"rows", std::move(jrows)},
               {"files", json::array({"compare.csv", "compare.json"})}};
  write_text(detail::out_path(cfg, "compare.json"), summary.dump(2) + "\n");
  return summary;
}

// Monte Carlo metrics for the optimal policy, or for a policy table loaded
// from a previous solve.
inline json cmd_simulate(const ExperimentConfig& cfg,
                         const std::optional<std::string>& policy_path = std::nullopt,
                         bool with_trace = false) {
  PolicyTable pol;
  json origin;
  if (policy_path) {
    pol = parse_policy_csv(read_text(*policy_path), cfg.model);
    origin = json{{"policy_source", *policy_path}};
  } else {
    SolveResult res = rvi_solve(build_kernel(cfg.model, cfg.objective, cfg.tx_mode), cfg.solver);
    pol = std::move(res.policy);
    origin = json{{"policy_source", "solved"}, {"gain", res.gain}};
  }

  SimOptions so;
  so.horizon = cfg.horizon;
  so.replications = cfg.replications;
  so.seed = cfg.seed;
  so.burn_in = cfg.burn_in;
  so.threads = cfg.threads;
  so.tx_mode = cfg.tx_mode;
  SimMetrics metrics = run_simulation(pol, cfg.model, so);

  json summary{{"command", "simulate"},
               {"params", params_json(cfg.model)},
               {"objective", to_string(cfg.objective)},
               {"tx_mode", to_string(cfg.tx_mode)},
               {"horizon", cfg.horizon},
               {"replications", cfg.replications},
               {"seed", cfg.seed},
               {"burn_in", cfg.burn_in},
               {"metrics", metrics_json(metrics)}};
  summary.update(origin);

  json files = json::array({"sim_metrics.json"});
  if (with_trace) {
    long n = std::min<long>(cfg.horizon, 10'000);
    write_text(detail::out_path(cfg, "trace.csv"),
               trace_csv(trace_simulation(pol, cfg.model, n, cfg.seed, cfg.tx_mode)));
    files.push_back("trace.csv");
  }
  summary["files"] = std::move(files);
  write_text(detail::out_path(cfg, "sim_metrics.json"), summary.dump(2) + "\n");
  return summary;
}

// Structural report: either the classes of a fixed policy's chain, or the
// union over feasible actions to certify that every state can reach every
// other under some policy.
inline json cmd_analyze_chain(const ExperimentConfig& cfg,
                              const std::optional<std::string>& policy_path = std::nullopt) {
  MdpKernel kernel = build_kernel(cfg.model, cfg.objective, cfg.tx_mode);
  json summary{{"command", "analyze-chain"}, {"params", params_json(cfg.model)},
               {"tx_mode", to_string(cfg.tx_mode)}};
  if (policy_path) {
    PolicyTable pol = parse_policy_csv(read_text(*policy_path), cfg.model);
    ClassDecomposition dec = decompose(induce_chain(kernel, pol));
    summary["mode"] = "policy";
    summary["policy_source"] = *policy_path;
    summary.update(decomposition_json(dec, cfg.model));
  } else {
    ClassDecomposition dec = decompose(union_chain(kernel));
    summary["mode"] = "union";
    summary["communicating"] = dec.classes.size() == 1;
    summary.update(decomposition_json(dec, cfg.model));
  }
  summary["files"] = json::array({"chain.json"});
  write_text(detail::out_path(cfg, "chain.json"), summary.dump(2) + "\n");
  return summary;
}

// Conditional AoII distribution at a given age, with its expected cost.
inline json cmd_belief(const ExperimentConfig& cfg, int theta) {
  BeliefVector b = belief_from_aoi(theta, cfg.model);
  write_text(detail::out_path(cfg, "belief.csv"), belief_csv(b));
  return json{{"command", "belief"},
              {"params", params_json(cfg.model)},
              {"theta", theta},
              {"expected_aoii", b.expected_aoii()},
              {"mass", b.mass},
              {"files", json::array({"belief.csv"})}};
}

// Full transition and cost tables, one row per (state, action, successor).
inline json cmd_kernel_dump(const ExperimentConfig& cfg) {
  MdpKernel kernel = build_kernel(cfg.model, cfg.objective, cfg.tx_mode);
  write_text(detail::out_path(cfg, "kernel.csv"), kernel_csv(kernel));
  write_text(detail::out_path(cfg, "cost.csv"), cost_csv(kernel));
  return json{{"command", "kernel-dump"},
              {"params", params_json(cfg.model)},
              {"objective", to_string(cfg.objective)},
              {"tx_mode", to_string(cfg.tx_mode)},
              {"n_states", kernel.n_states},
              {"files", json::array({"kernel.csv", "cost.csv"})}};
}

}  // namespace aoii
