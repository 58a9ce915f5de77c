#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "pcvx/env.hpp"
#include "pcvx/mdp.hpp"

using namespace pcvx;

namespace {

EnvConfig config_mnv(int m, int n, int v) {
  EnvConfig cfg;
  cfg.num_v2n = m;
  cfg.num_platoons = n;
  cfg.members_per_platoon = v;
  return cfg;
}

}  // namespace

TEST_CASE("action encoding is a bijection") {
  EnvConfig cfg = config_mnv(2, 4, 3);
  CHECK(action_count(cfg) == 8);
  CHECK(encode_action(Action{0, 0}, cfg) == 0);
  CHECK(decode_action(7, cfg) == Action{1, 3});

  std::vector<bool> seen(action_count(cfg), false);
  for (int s = 0; s < cfg.num_v2n; ++s)
    for (int p = 0; p < cfg.power_level_count(); ++p) {
      const Action a{s, p};
      const int flat = encode_action(a, cfg);
      CHECK_FALSE(seen[flat]);
      seen[flat] = true;
      CHECK(decode_action(flat, cfg) == a);
    }
  for (bool s : seen) CHECK(s);

  CHECK_THROWS_AS(decode_action(8, cfg), std::out_of_range);
  CHECK_THROWS_AS(decode_action(-1, cfg), std::out_of_range);
  CHECK_THROWS_AS(encode_action(Action{2, 0}, cfg), std::out_of_range);
}

TEST_CASE("v2v utility") {
  CHECK(v2v_utility(1.23e6, 0.0, 50.0, 1e6) == 50.0);
  CHECK(v2v_utility(1e6, 100.0, 50.0, 1e6) == doctest::Approx(1.0));
  CHECK(v2v_utility(0.0, 100.0, 50.0, 1e6) == 0.0);
}

TEST_CASE("common reward") {
  EnvConfig cfg;
  RewardWeights weights;

  SUBCASE("direct substitution") {
    // sum V2N spectral efficiency 10, sum utilities 20, 4 ms elapsed
    const std::vector<double> v2n = {10e6};  // /1 MHz -> 10
    const std::vector<double> utilities = {12.0, 8.0};
    CHECK(compute_reward(v2n, utilities, 4, weights, cfg) ==
          doctest::Approx(0.7 * 10.0 + 0.3 * 20.0 - 0.25 * 4.0).epsilon(1e-12));
  }

  SUBCASE("no time penalty on the first step") {
    CHECK(compute_reward({}, {}, 0, weights, cfg) == 0.0);
  }

  SUBCASE("only the penalty survives when everything is silent") {
    for (int t = 1; t <= 9; ++t)
      CHECK(compute_reward({0.0}, {0.0, 0.0}, t, weights, cfg) ==
            doctest::Approx(-0.25 * t).epsilon(1e-12));
  }

  SUBCASE("monotone in each rate and utility") {
    const std::vector<double> v2n = {2e6, 3e6};
    const std::vector<double> utilities = {1.0, 4.0};
    const double base = compute_reward(v2n, utilities, 3, weights, cfg);
    CHECK(compute_reward({2e6, 4e6}, utilities, 3, weights, cfg) > base);
    CHECK(compute_reward(v2n, {1.5, 4.0}, 3, weights, cfg) > base);
  }
}

TEST_CASE("observation layout") {
  CHECK(observation_dim(config_mnv(2, 4, 3)) == 24);
  CHECK(observation_dim(config_mnv(1, 4, 3)) == 20);
  CHECK(observation_dim(config_mnv(1, 1, 3)) == 3 + 0 + 3 + 1 + 4);

  EnvConfig cfg = config_mnv(2, 4, 3);
  Rng rng(21);
  EpisodeState state = reset_episode(cfg, rng);

  SUBCASE("fresh episode: full payload, full time, zero interferer block") {
    const Observation obs = build_observation(state, 0, 0.25, 0.75);
    REQUIRE(static_cast<int>(obs.values.size()) == 24);
    for (double x : obs.values) CHECK(std::isfinite(x));
    const int v = cfg.members_per_platoon;
    for (int k = v; k < v + v * (cfg.num_platoons - 1); ++k) CHECK(obs.values[k] == 0.0);
    CHECK(obs.values[20] == 1.0);  // remaining payload
    CHECK(obs.values[21] == 1.0);  // remaining time
    CHECK(obs.values[22] == 0.25);
    CHECK(obs.values[23] == 0.75);
  }

  SUBCASE("co-channel leaders appear, others stay masked") {
    // 0 and 1 share band 0; 2 and 3 transmit on band 1.
    step(state, {Action{0, 0}, Action{0, 0}, Action{1, 0}, Action{1, 0}});
    const Observation obs = build_observation(state, 0, 0.5, 0.5);
    const int v = cfg.members_per_platoon;
    for (int i = 0; i < v; ++i) {
      const int base = v + i * (cfg.num_platoons - 1);
      CHECK(obs.values[base + 0] != 0.0);  // platoon 1 shared our band
      CHECK(obs.values[base + 1] == 0.0);  // platoon 2 on the other band
      CHECK(obs.values[base + 2] == 0.0);  // platoon 3 on the other band
    }
  }

  SUBCASE("remaining time decays stepwise") {
    step(state, {Action{0, 0}, Action{0, 1}, Action{1, 2}, Action{1, 3}});
    const Observation obs = build_observation(state, 0, 0.0, 1.0);
    CHECK(obs.values[21] == doctest::Approx(0.9));
  }

  SUBCASE("inactive or out-of-range agents are rejected") {
    CHECK_THROWS_AS(build_observation(state, 9, 0.0, 0.0), std::out_of_range);
    state.payload.active[2] = false;
    CHECK_THROWS_AS(build_observation(state, 2, 0.0, 0.0), std::logic_error);
  }
}

TEST_CASE("observation dimension is stable across an episode") {
  EnvConfig cfg = config_mnv(2, 4, 3);
  Rng rng(33);
  EpisodeState state = reset_episode(cfg, rng);
  Rng action_rng(3);
  while (!state.done) {
    for (int n = 0; n < cfg.num_platoons; ++n)
      if (state.payload.active[n])
        CHECK(static_cast<int>(build_observation(state, n, 0.1, 0.9).values.size()) == 24);
    std::vector<std::optional<Action>> joint(cfg.num_platoons);
    for (int n = 0; n < cfg.num_platoons; ++n)
      if (state.payload.active[n])
        joint[n] = Action{action_rng.uniform_int(cfg.num_v2n),
                          action_rng.uniform_int(cfg.power_level_count())};
    step(state, joint);
  }
}
