#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <charconv>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>

#include "aoii/io.hpp"

using namespace aoii;

TEST_CASE("number formatting round-trips exactly", "[io]") {
  for (double v : {0.1, 1.0 / 3.0, 0.35, 1e-300, 123456789.123456789, 0.6159788895735065,
                   1.6648048544498, 0.0, -2.5e-7}) {
    std::string text = fmt(v);
    double back = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), back);
    REQUIRE(ec == std::errc());
    REQUIRE(ptr == text.data() + text.size());
    CHECK(back == v);
    CHECK(text.find(',') == std::string::npos);
  }
  CHECK(fmt(0.35) == "0.35");
  CHECK(fmt(1.0) == "1");
}

TEST_CASE("policy tables survive a csv round-trip", "[io]") {
  ModelParams m;
  MdpKernel k = build_kernel(m);
  std::mt19937 rng(5);
  PolicyTable pol;
  pol.choice.assign(std::size_t(k.n_states), Action::Idle);
  for (int s = 0; s < k.n_states; ++s)
    if (k.act_feasible_at(s) && rng() % 2 == 0) pol.choice[std::size_t(s)] = Action::Act;

  std::vector<double> values(std::size_t(k.n_states));
  for (int s = 0; s < k.n_states; ++s) values[std::size_t(s)] = 0.01 * s - 3.0;

  PolicyTable parsed = parse_policy_csv(policy_csv(k, pol, &values), m);
  CHECK(parsed.choice == pol.choice);
  PolicyTable parsed_plain = parse_policy_csv(policy_csv(k, pol), m);
  CHECK(parsed_plain.choice == pol.choice);
}

TEST_CASE("policy parsing rejects malformed tables", "[io]") {
  ModelParams m;
  MdpKernel k = build_kernel(m);
  PolicyTable idle;
  idle.choice.assign(std::size_t(k.n_states), Action::Idle);
  std::string good = policy_csv(k, idle);

  std::string truncated = good.substr(0, good.rfind("10,20"));
  CHECK_THROWS_AS(parse_policy_csv(truncated, m), std::invalid_argument);

  std::string duplicated = good + "0,1,idle\n";
  CHECK_THROWS_AS(parse_policy_csv(duplicated, m), std::invalid_argument);

  std::string bad_action = good;
  bad_action.replace(bad_action.find("0,1,idle"), 8, "0,1,wait");
  CHECK_THROWS_AS(parse_policy_csv(bad_action, m), std::invalid_argument);

  std::string infeasible = good;
  infeasible.replace(infeasible.find("0,1,idle"), 8, "0,1,act");
  CHECK_THROWS_AS(parse_policy_csv(infeasible, m), std::invalid_argument);

  CHECK_THROWS_AS(parse_policy_csv("e,theta,action\n5\n", m), std::invalid_argument);
}

TEST_CASE("kernel and cost tables are well formed", "[io]") {
  ModelParams m{0.7, 0.5, 2, 1, 1, 3};
  MdpKernel k = build_kernel(m);
  std::string csv = kernel_csv(k);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "e,theta,action,next_e,next_theta,prob");
  std::map<std::string, double> sums;
  while (std::getline(in, line)) {
    std::size_t third = 0;
    for (int c = 0; c < 3; ++c) third = line.find(',', third) + 1;
    sums[line.substr(0, third - 1)] += std::stod(line.substr(line.rfind(',') + 1));
  }
  REQUIRE(sums.size() == std::size_t(k.n_states) + 3);  // 3 act-feasible states
  for (const auto& [key, sum] : sums) CHECK(sum == Catch::Approx(1.0).margin(1e-12));

  std::string costs = cost_csv(k);
  CHECK(costs.find("e,theta,cost") == 0);
  CHECK(std::count(costs.begin(), costs.end(), '\n') == k.n_states + 1);
}

TEST_CASE("belief and trace tables include headers", "[io]") {
  ModelParams m;
  BeliefVector b = belief_from_aoi(2, m);
  std::string csv = belief_csv(b);
  CHECK(csv.find("age,mass\n0,0.58\n") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  std::vector<TraceRow> rows{{1, 0, 0, 3, 1, 0, 1, 1}};
  CHECK(trace_csv(rows) == "t,x,x_hat,e,theta,delta,action,transmitted\n1,0,0,3,1,0,1,1\n");
}

TEST_CASE("text files write through fresh directories", "[io]") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "aoii_io_test" / "nested";
  fs::remove_all(dir.parent_path());
  std::string path = (dir / "x.txt").string();
  write_text(path, "payload");
  CHECK(read_text(path) == "payload");
  CHECK_THROWS_AS(read_text((dir / "missing.txt").string()), std::runtime_error);
  fs::remove_all(dir.parent_path());
}

TEST_CASE("json encoders carry the parameter set", "[io]") {
  ModelParams m;
  json j = params_json(m);
  CHECK(j["p"] == 0.7);
  CHECK(j["mu"] == 0.5);
  CHECK(j["cap_e"] == 10);
  CHECK(j["c_s"] == 1);
  CHECK(j["c_t"] == 1);
  CHECK(j["n_max"] == 20);

  Estimate e{1.5, 0.1, 0.196};
  json je = estimate_json(e);
  CHECK(je["mean"] == 1.5);
  CHECK(je["half_width"] == 0.196);
}
