#include <catch2/catch_amalgamated.hpp>

#include "aoii/model.hpp"
#include "oracles.hpp"

using namespace aoii;

TEST_CASE("pow_int matches small integer powers", "[model]") {
  CHECK(pow_int(0.3, 0) == 1.0);
  CHECK(pow_int(0.3, 1) == 0.3);
  CHECK(pow_int(-0.4, 2) == Catch::Approx(0.16).margin(1e-15));
  CHECK(pow_int(0.3, 5) == Catch::Approx(0.00243).margin(1e-14));
  CHECK(pow_int(1.0, 1'000'000) == 1.0);
  CHECK_THROWS_AS(pow_int(0.5, -1), std::invalid_argument);
}

TEST_CASE("pow_int flushes vanishing powers to exact zero", "[model]") {
  CHECK(pow_int(0.1, 400) == 0.0);
  CHECK(pow_int(0.4, 2000) == 0.0);
}

TEST_CASE("g matches the one-step recursion", "[model]") {
  for (double p : {0.55, 0.6, 0.7, 0.9, 0.99, 1.0}) {
    double r = 1.0;
    double worst = 0.0;
    for (long n = 1; n <= 64; ++n) {
      r = p * r + (1.0 - p) * (1.0 - r);
      worst = std::max(worst, std::abs(g(n, p) - r));
    }
    INFO("p = " << p);
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("g endpoints are exact", "[model]") {
  for (double p : {0.50000001, 0.55, 0.6, 0.7, 0.9, 0.99, 1.0}) {
    CHECK(g(0, p) == 1.0);
    CHECK(g(1, p) == p);
  }
}

TEST_CASE("g agrees with path enumeration", "[model]") {
  for (double p : {0.6, 0.7, 0.9})
    for (int n : {2, 3, 5, 8, 12, 16}) {
      INFO("p = " << p << ", n = " << n);
      CHECK(g(n, p) == Catch::Approx(oracles::match_prob(n, p)).margin(1e-12));
    }
}

TEST_CASE("g decays towards one half", "[model]") {
  // strictly until (2p-1)^n falls below one ulp of 1, then flat at exactly 0.5
  double prev = g(0, 0.7);
  for (long n = 1; n <= 32; ++n) {
    CHECK(g(n, 0.7) < prev);
    prev = g(n, 0.7);
  }
  CHECK(prev > 0.5);
  for (long n = 33; n <= 64; ++n) {
    CHECK(g(n, 0.7) <= prev);
    prev = g(n, 0.7);
  }
  CHECK(g(64, 0.7) == 0.5);
  CHECK(g(10'000, 0.7) == 0.5);  // flushed tail
  CHECK(g(10'000, 1.0) == 1.0);
}

TEST_CASE("g rejects out-of-domain arguments", "[model]") {
  CHECK_THROWS_AS(g(-1, 0.7), std::invalid_argument);
  CHECK_THROWS_AS(g(3, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(g(3, 1.1), std::invalid_argument);
}

TEST_CASE("parameter validation", "[model]") {
  CHECK_NOTHROW(ModelParams{}.validate());
  ModelParams edge{1.0, 0.0, 1, 0, 1, 2};
  CHECK_NOTHROW(edge.validate());
  edge.mu = 1.0;
  CHECK_NOTHROW(edge.validate());

  ModelParams m;
  m.p = 0.5;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = ModelParams{};
  m.p = 1.0001;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = ModelParams{};
  m.mu = -0.1;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = ModelParams{};
  m.mu = 1.5;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = ModelParams{};
  m.cap_e = 0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = ModelParams{};
  m.c_s = -1;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = ModelParams{};
  m.c_s = 0;
  m.c_t = 0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = ModelParams{};
  m.n_max = 1;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("feasibility of acting", "[model]") {
  ModelParams m;
  CHECK(m.act_cost() == 2);
  CHECK(m.act_ever_feasible());
  CHECK_FALSE(act_feasible({1, 5}, m));
  CHECK(act_feasible({2, 5}, m));
  CHECK(feasible_actions({0, 1}, m) == std::vector<Action>{Action::Idle});
  CHECK(feasible_actions({3, 1}, m) ==
        std::vector<Action>{Action::Idle, Action::Act});

  ModelParams starved;
  starved.cap_e = 1;
  CHECK_FALSE(starved.act_ever_feasible());
}

TEST_CASE("state indexing round-trips", "[model]") {
  for (ModelParams m : {ModelParams{}, ModelParams{0.7, 0.5, 1, 1, 1, 2}}) {
    CHECK(m.n_states() == (m.cap_e + 1) * m.n_max);
    for (int idx = 0; idx < m.n_states(); ++idx) {
      MdpState s = state_from_index(idx, m);
      CHECK(state_index(s, m) == idx);
    }
  }
  ModelParams m;
  CHECK(state_index({0, 1}, m) == 0);
  CHECK(state_index({1, 1}, m) == m.n_max);
  CHECK_THROWS_AS(state_index({-1, 1}, m), std::out_of_range);
  CHECK_THROWS_AS(state_index({11, 1}, m), std::out_of_range);
  CHECK_THROWS_AS(state_index({0, 0}, m), std::out_of_range);
  CHECK_THROWS_AS(state_index({0, 21}, m), std::out_of_range);
  CHECK_THROWS_AS(state_from_index(-1, m), std::out_of_range);
  CHECK_THROWS_AS(state_from_index(m.n_states(), m), std::out_of_range);
}
