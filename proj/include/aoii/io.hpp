#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aoii/chain_analysis.hpp"
#include "aoii/mdp.hpp"
#include "aoii/model.hpp"
#include "aoii/simulator.hpp"
#include "aoii/solver.hpp"

namespace aoii {

using nlohmann::json;

// Shortest round-trip decimal form: reading the text back yields the exact
// same double, independent of locale.
inline std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("fmt: to_chars failed");
  return std::string(buf, ptr);
}

inline void write_text(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(content.data(), std::streamsize(content.size()));
  if (!out) throw std::runtime_error("short write to '" + path + "'");
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline json params_json(const ModelParams& m) {
  return json{{"p", m.p},     {"mu", m.mu},   {"cap_e", m.cap_e},
              {"c_s", m.c_s}, {"c_t", m.c_t}, {"n_max", m.n_max}};
}

inline json estimate_json(const Estimate& e) {
  return json{{"mean", e.mean}, {"se", e.se}, {"half_width", e.half_width}};
}

inline json metrics_json(const SimMetrics& m) {
  return json{{"avg_aoii", estimate_json(m.avg_aoii)},
              {"avg_aoi", estimate_json(m.avg_aoi)},
              {"real_time_error", estimate_json(m.real_time_error)},
              {"action_rate", estimate_json(m.action_rate)},
              {"transmit_rate", estimate_json(m.transmit_rate)},
              {"mean_energy", estimate_json(m.mean_energy)},
              {"slots_scored", m.slots_scored},
              {"replications", m.replications},
              {"batches_per_replication", m.batches_per_replication}};
}

inline std::string policy_csv(const MdpKernel& k, const PolicyTable& pol,
                              const std::vector<double>* values = nullptr) {
  std::string out = values ? "e,theta,action,value\n" : "e,theta,action\n";
  for (int s = 0; s < k.n_states; ++s) {
    MdpState st = state_from_index(s, k.params);
    out += std::to_string(st.e) + "," + std::to_string(st.theta) + "," +
           to_string(pol.choice[std::size_t(s)]);
    if (values) out += "," + fmt((*values)[std::size_t(s)]);
    out += "\n";
  }
  return out;
}

// Accepts the files policy_csv writes (the value column is optional) and
// checks the table covers every state exactly once with feasible actions.
inline PolicyTable parse_policy_csv(const std::string& text, const ModelParams& m) {
  PolicyTable pol;
  pol.choice.assign(std::size_t(m.n_states()), Action::Idle);
  std::vector<bool> seen(std::size_t(m.n_states()), false);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line_no == 1) continue;  // header
    std::istringstream row(line);
    std::string e_s, theta_s, action_s;
    if (!std::getline(row, e_s, ',') || !std::getline(row, theta_s, ',') ||
        !std::getline(row, action_s, ','))
      throw std::invalid_argument("policy csv line " + std::to_string(line_no) +
                                  ": expected e,theta,action");
    MdpState st{std::stoi(e_s), std::stoi(theta_s)};
    int idx = state_index(st, m);
    if (seen[std::size_t(idx)])
      throw std::invalid_argument("policy csv line " + std::to_string(line_no) +
                                  ": duplicate state");
    seen[std::size_t(idx)] = true;
    Action a;
    if (action_s == "idle") a = Action::Idle;
    else if (action_s == "act") a = Action::Act;
    else
      throw std::invalid_argument("policy csv line " + std::to_string(line_no) +
                                  ": action must be idle or act, got '" + action_s + "'");
    if (a == Action::Act && !act_feasible(st, m))
      throw std::invalid_argument("policy csv line " + std::to_string(line_no) +
                                  ": act infeasible at e=" + e_s + ", theta=" + theta_s);
    pol.choice[std::size_t(idx)] = a;
  }
  for (int s = 0; s < m.n_states(); ++s)
    if (!seen[std::size_t(s)]) {
      MdpState st = state_from_index(s, m);
      throw std::invalid_argument("policy csv: missing state e=" + std::to_string(st.e) +
                                  ", theta=" + std::to_string(st.theta));
    }
  return pol;
}

inline std::string kernel_csv(const MdpKernel& k) {
  std::string out = "e,theta,action,next_e,next_theta,prob\n";
  for (int s = 0; s < k.n_states; ++s) {
    MdpState st = state_from_index(s, k.params);
    for (Action a : feasible_actions(st, k.params))
      for (const Transition& t : k.row(s, a)) {
        MdpState nx = state_from_index(t.next, k.params);
        out += std::to_string(st.e) + "," + std::to_string(st.theta) + "," + to_string(a) + "," +
               std::to_string(nx.e) + "," + std::to_string(nx.theta) + "," + fmt(t.prob) + "\n";
      }
  }
  return out;
}

inline std::string cost_csv(const MdpKernel& k) {
  std::string out = "e,theta,cost\n";
  for (int s = 0; s < k.n_states; ++s) {
    MdpState st = state_from_index(s, k.params);
    out += std::to_string(st.e) + "," + std::to_string(st.theta) + "," +
           fmt(k.cost[std::size_t(s)]) + "\n";
  }
  return out;
}

inline std::string belief_csv(const BeliefVector& b) {
  std::string out = "age,mass\n";
  for (std::size_t i = 0; i < b.mass.size(); ++i)
    out += std::to_string(i) + "," + fmt(b.mass[i]) + "\n";
  return out;
}

inline std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::string out = "t,x,x_hat,e,theta,delta,action,transmitted\n";
  for (const TraceRow& r : rows)
    out += std::to_string(r.t) + "," + std::to_string(r.x) + "," + std::to_string(r.x_hat) + "," +
           std::to_string(r.e) + "," + std::to_string(r.theta) + "," + std::to_string(r.delta) +
           "," + std::to_string(r.action) + "," + std::to_string(r.transmitted) + "\n";
  return out;
}

inline json decomposition_json(const ClassDecomposition& d, const ModelParams& m) {
  json classes = json::array();
  for (const StateClass& c : d.classes) {
    json states = json::array();
    for (int s : c.states) {
      MdpState st = state_from_index(s, m);
      states.push_back(json::array({st.e, st.theta}));
    }
    classes.push_back(json{{"recurrent", c.recurrent},
                           {"size", int(c.states.size())},
                           {"states", std::move(states)}});
  }
  return json{{"n_classes", int(d.classes.size())},
              {"n_recurrent", d.recurrent_count()},
              {"classes", std::move(classes)}};
}

}  // namespace aoii
