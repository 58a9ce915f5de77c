#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <filesystem>

#include "oracles.hpp"
#include "pcvx/agent.hpp"
#include "pcvx/checkpoint.hpp"
#include "pcvx/mlp.hpp"

using namespace pcvx;

namespace {

std::vector<double> random_vector(int n, Rng& rng, double lo = -2.0, double hi = 2.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("q_forward basics") {
  SUBCASE("zero parameters give a zero Q row") {
    const MlpParams params = make_mlp({4, 8, 3});
    const std::vector<double> input = {1.0, -2.0, 0.5, 3.0};
    for (double q : mlp_forward(params, input)) CHECK(q == 0.0);
  }

  SUBCASE("identity 1-d network passes the input through") {
    MlpParams params = make_mlp({1, 1});
    params.weights[0][0] = 1.0;
    for (double x : {-3.0, 0.0, 2.5})
      CHECK(mlp_forward(params, std::vector<double>{x})[0] == x);
  }

  SUBCASE("an output bias shift moves exactly one Q value") {
    Rng rng(2);
    MlpParams params = make_mlp({5, 6, 4});
    init_params(params, rng);
    const std::vector<double> input = random_vector(5, rng);
    const std::vector<double> base = mlp_forward(params, input);
    params.biases.back()[2] += 0.125;
    const std::vector<double> shifted = mlp_forward(params, input);
    for (int a = 0; a < 4; ++a)
      CHECK(shifted[a] == doctest::Approx(base[a] + (a == 2 ? 0.125 : 0.0)).epsilon(1e-15));
  }

  SUBCASE("input width mismatch throws") {
    const MlpParams params = make_mlp({4, 2});
    CHECK_THROWS_AS(mlp_forward(params, std::vector<double>{1.0, 2.0}), std::invalid_argument);
  }
}

TEST_CASE("gradient matches central finite differences") {
  // Full-size network: 24 inputs, 100/50/24 hidden, 8 actions.
  for (std::uint64_t seed : {11u, 22u, 33u}) {
    Rng rng(seed);
    MlpParams params = make_mlp({24, 100, 50, 24, 8});
    init_params(params, rng);

    std::vector<std::vector<double>> states;
    std::vector<QSample> batch;
    for (int b = 0; b < 4; ++b) states.push_back(random_vector(24, rng));
    for (int b = 0; b < 4; ++b)
      batch.push_back(QSample{states[b], rng.uniform_int(8), rng.uniform(-5.0, 5.0)});

    const MlpGrads analytic = q_gradient(params, batch);
    const oracle::FdCheck fd = oracle::fd_gradient_check(params, batch, analytic, 1e-6);
    CHECK(fd.compared > 8000);
    CHECK(fd.worst_rel < 1e-5);
  }
}

TEST_CASE("gradient edge cases") {
  Rng rng(5);
  MlpParams params = make_mlp({3, 6, 2});
  init_params(params, rng);
  const std::vector<double> s = random_vector(3, rng);

  SUBCASE("zero residual, zero gradient") {
    const double q0 = mlp_forward(params, s)[0];
    double loss = 1.0;
    const MlpGrads grads = q_gradient(params, {QSample{s, 0, q0}}, &loss);
    CHECK(loss == 0.0);
    for (const auto& layer : grads.weights)
      for (double g : layer) CHECK(g == 0.0);
    for (const auto& layer : grads.biases)
      for (double g : layer) CHECK(g == 0.0);
  }

  SUBCASE("doubling the residual doubles the gradient") {
    const double q0 = mlp_forward(params, s)[1];
    const MlpGrads g1 = q_gradient(params, {QSample{s, 1, q0 - 1.0}});
    const MlpGrads g2 = q_gradient(params, {QSample{s, 1, q0 - 2.0}});
    for (std::size_t l = 0; l < g1.weights.size(); ++l)
      for (std::size_t k = 0; k < g1.weights[l].size(); ++k)
        CHECK(g2.weights[l][k] == doctest::Approx(2.0 * g1.weights[l][k]).epsilon(1e-12));
  }

  SUBCASE("empty batch throws") {
    CHECK_THROWS_AS(q_gradient(params, {}), std::invalid_argument);
  }
}

TEST_CASE("rmsprop update") {
  SUBCASE("zero gradient leaves parameters, decays the accumulator") {
    MlpParams params = make_mlp({1, 1});
    params.weights[0][0] = 0.7;
    RmsPropState state = make_rmsprop_state(params);
    state.weights[0][0] = 1.0;
    MlpGrads grads = make_grads(params);
    rmsprop_step(params, grads, state, 0.001);
    CHECK(params.weights[0][0] == 0.7);
    CHECK(state.weights[0][0] == doctest::Approx(0.9).epsilon(1e-15));
  }

  SUBCASE("first step with unit gradient") {
    MlpParams params = make_mlp({1, 1});
    RmsPropState state = make_rmsprop_state(params);
    MlpGrads grads = make_grads(params);
    grads.weights[0][0] = 1.0;
    rmsprop_step(params, grads, state, 0.001);
    CHECK(params.weights[0][0] == doctest::Approx(-0.0031622775601683824).epsilon(1e-12));
  }

  SUBCASE("steps oppose the gradient sign") {
    Rng rng(9);
    MlpParams params = make_mlp({2, 3, 2});
    init_params(params, rng);
    MlpParams before = params;
    RmsPropState state = make_rmsprop_state(params);
    MlpGrads grads = make_grads(params);
    for (auto& layer : grads.weights)
      for (double& g : layer) g = rng.uniform(-1.0, 1.0);
    rmsprop_step(params, grads, state, 0.001);
    for (std::size_t l = 0; l < grads.weights.size(); ++l)
      for (std::size_t k = 0; k < grads.weights[l].size(); ++k) {
        const double delta = params.weights[l][k] - before.weights[l][k];
        if (grads.weights[l][k] != 0.0) CHECK(delta * grads.weights[l][k] < 0.0);
      }
  }
}

TEST_CASE("epsilon-greedy selection") {
  Rng rng(1);
  SUBCASE("pure greedy picks the argmax") {
    CHECK(select_action(std::vector<double>{1.0, 3.0, 2.0}, 0.0, rng) == 1);
  }
  SUBCASE("ties break to the lowest index") {
    CHECK(select_action(std::vector<double>{5.0, 5.0}, 0.0, rng) == 0);
  }
  SUBCASE("epsilon=1 explores uniformly") {
    const std::vector<double> q = {0.0, 9.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    std::vector<int> counts(8, 0);
    const int draws = 100000;
    for (int d = 0; d < draws; ++d) counts[select_action(q, 1.0, rng)] += 1;
    for (int c : counts) CHECK(std::abs(c / static_cast<double>(draws) - 0.125) < 0.01);
  }
  SUBCASE("invalid arguments throw") {
    CHECK_THROWS_AS(select_action(std::vector<double>{}, 0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(select_action(std::vector<double>{1.0}, 1.5, rng), std::invalid_argument);
  }
}

TEST_CASE("double-Q target") {
  Experience exp;
  exp.reward = 2.5;
  exp.terminal = true;
  const MlpParams dummy = make_mlp({1, 2});
  CHECK(double_q_target(dummy, dummy, exp, 0.95) == 2.5);

  // Online net prefers action 1, target net evaluates it as 3.
  MlpParams online = make_mlp({1, 2});
  online.biases[0] = {2.0, 5.0};
  MlpParams target = make_mlp({1, 2});
  target.biases[0] = {10.0, 3.0};
  Experience boot;
  boot.reward = 1.0;
  boot.terminal = false;
  boot.next_state = {0.0};
  CHECK(double_q_target(online, target, boot, 0.95) == doctest::Approx(3.85).epsilon(1e-12));
  CHECK(double_q_target(online, target, boot, 0.0) == doctest::Approx(1.0).epsilon(1e-15));

  SUBCASE("collapses to the max target when the nets coincide") {
    Rng rng(14);
    MlpParams net = make_mlp({3, 8, 4});
    init_params(net, rng);
    for (int trial = 0; trial < 20; ++trial) {
      Experience e;
      e.reward = rng.uniform(-2.0, 2.0);
      e.terminal = false;
      e.next_state = random_vector(3, rng);
      const std::vector<double> q = mlp_forward(net, e.next_state);
      const double max_q = *std::max_element(q.begin(), q.end());
      CHECK(double_q_target(net, net, e, 0.9) ==
            doctest::Approx(e.reward + 0.9 * max_q).epsilon(1e-12));
    }
  }
}

TEST_CASE("replay buffer") {
  SUBCASE("FIFO eviction at capacity") {
    ReplayBuffer buffer(2);
    for (int k = 0; k < 3; ++k) {
      Experience e;
      e.action = k;
      buffer.push(std::move(e));
    }
    CHECK(buffer.size() == 2);
    CHECK(buffer.at(0).action == 1);
    CHECK(buffer.at(1).action == 2);
  }

  SUBCASE("single entry sampling") {
    ReplayBuffer buffer(4);
    Experience e;
    e.action = 42;
    buffer.push(std::move(e));
    Rng rng(3);
    CHECK(buffer.sample(1, rng)[0]->action == 42);
    CHECK_THROWS_AS(buffer.sample(2, rng), std::logic_error);
  }

  SUBCASE("sampling is uniform over the contents") {
    ReplayBuffer buffer(200);
    for (int k = 0; k < 100; ++k) {
      Experience e;
      e.action = k;
      buffer.push(std::move(e));
    }
    Rng rng(8);
    std::vector<int> counts(100, 0);
    const int draws = 100000;
    for (int d = 0; d < draws; ++d) counts[buffer.sample(1, rng)[0]->action] += 1;
    for (int c : counts) CHECK(std::abs(c / static_cast<double>(draws) - 0.01) < 0.003);
  }
}

TEST_CASE("target synchronization") {
  Rng rng(6);
  MlpParams online = make_mlp({4, 10, 3});
  init_params(online, rng);
  MlpParams target = make_mlp({4, 10, 3});
  sync_target(online, target);

  const std::vector<double> probe = random_vector(4, rng);
  CHECK(mlp_forward(online, probe) == mlp_forward(target, probe));

  // Online updates leave the target untouched until the next sync.
  RmsPropState opt = make_rmsprop_state(online);
  const MlpGrads grads = q_gradient(online, {QSample{probe, 1, 10.0}});
  rmsprop_step(online, grads, opt, 0.01);
  CHECK(mlp_forward(online, probe) != mlp_forward(target, probe));

  sync_target(online, target);
  const MlpParams snapshot = target;
  sync_target(online, target);
  CHECK(snapshot.weights == target.weights);  // idempotent
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  ExperimentConfig cfg;
  cfg.env.num_v2n = 2;
  cfg.train.hidden_sizes = {16, 8};
  Rng rng(77);
  std::vector<Agent> agents = make_agents(cfg.env, cfg.train, rng);
  // Make the optimizer state nonzero too.
  const std::vector<double> probe = random_vector(observation_dim(cfg.env), rng);
  const MlpGrads grads = q_gradient(agents[0].online, {QSample{probe, 0, 1.0}});
  rmsprop_step(agents[0].online, grads, agents[0].optimizer, 0.001);

  const std::string dir = (std::filesystem::temp_directory_path() / "pcvx_ckpt_test").string();
  std::filesystem::remove_all(dir);
  save_agents(dir, agents, cfg);
  const std::vector<Agent> loaded = load_agents(dir, cfg);
  REQUIRE(loaded.size() == agents.size());
  for (std::size_t a = 0; a < agents.size(); ++a) {
    for (int k = 0; k < 20; ++k) {
      const std::vector<double> x = random_vector(observation_dim(cfg.env), rng);
      CHECK(mlp_forward(agents[a].online, x) == mlp_forward(loaded[a].online, x));
    }
    CHECK(agents[a].optimizer.weights == loaded[a].optimizer.weights);
  }

  SUBCASE("missing checkpoint names the path") {
    ExperimentConfig other = cfg;
    other.env.num_platoons = 6;  // agent_4 was never written
    try {
      load_agents(dir, other);
      FAIL("expected a missing-checkpoint error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("agent_4.ckpt") != std::string::npos);
    }
  }

  SUBCASE("config mismatch is rejected") {
    ExperimentConfig other = cfg;
    other.env.power_levels_dbm = {23.0, 10.0};
    CHECK_THROWS_AS(load_agents(dir, other), std::runtime_error);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("training episode bookkeeping") {
  EnvConfig env_cfg;
  env_cfg.num_v2n = 1;
  env_cfg.num_platoons = 2;
  env_cfg.members_per_platoon = 2;
  TrainConfig train_cfg;
  train_cfg.episodes = 10;
  train_cfg.batch_size = 8;
  train_cfg.hidden_sizes = {12, 8};
  RewardWeights weights;

  auto run = [&](int episodes) {
    Rng init(100), env_rng(200), policy(300);
    std::vector<Agent> agents = make_agents(env_cfg, train_cfg, init);
    EpisodeStats last;
    for (int e = 0; e < episodes; ++e)
      last = run_training_episode(agents, env_cfg, train_cfg, weights, e, env_rng, policy);
    return std::make_pair(std::move(agents), last);
  };

  SUBCASE("buffer grows by at most the episode length per agent") {
    auto [agents, last] = run(1);
    for (const Agent& agent : agents)
      CHECK(agent.buffer.size() <= static_cast<std::size_t>(env_cfg.steps_per_episode()));
    CHECK(last.steps <= env_cfg.steps_per_episode());
  }

  SUBCASE("loss appears once the buffer warms up and is nonnegative") {
    auto [agents, last] = run(6);
    for (double loss : last.losses) {
      CHECK(std::isfinite(loss));
      CHECK(loss >= 0.0);
    }
  }

  SUBCASE("bitwise deterministic under fixed seeds") {
    auto [agents_a, last_a] = run(5);
    auto [agents_b, last_b] = run(5);
    for (std::size_t a = 0; a < agents_a.size(); ++a) {
      CHECK(agents_a[a].online.weights == agents_b[a].online.weights);
      CHECK(agents_a[a].online.biases == agents_b[a].online.biases);
    }
    CHECK(last_a.reward_sum == last_b.reward_sum);
  }

  SUBCASE("agents never touch each other's parameters") {
    Rng init(100), env_rng(200), policy(300);
    std::vector<Agent> agents = make_agents(env_cfg, train_cfg, init);
    const MlpParams frozen = agents[1].online;
    // Drive only agent 0's optimizer.
    const std::vector<double> probe(observation_dim(env_cfg), 0.5);
    const MlpGrads grads = q_gradient(agents[0].online, {QSample{probe, 0, 3.0}});
    rmsprop_step(agents[0].online, grads, agents[0].optimizer, 0.01);
    CHECK(agents[1].online.weights == frozen.weights);
    CHECK(agents[1].online.biases == frozen.biases);
  }
}

TEST_CASE("epsilon schedule decays linearly then holds") {
  EpsilonSchedule schedule;  // 1.0 -> 0.02 over the first 80%
  CHECK(schedule.at(0, 1000) == 1.0);
  CHECK(schedule.at(400, 1000) == doctest::Approx(0.51).epsilon(1e-12));
  CHECK(schedule.at(800, 1000) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(schedule.at(999, 1000) == doctest::Approx(0.02).epsilon(1e-12));
  for (int e = 1; e < 1000; ++e) CHECK(schedule.at(e, 1000) <= schedule.at(e - 1, 1000));
}
