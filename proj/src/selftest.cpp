#include "pcvx/selftest.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "pcvx/agent.hpp"
#include "pcvx/baselines.hpp"
#include "pcvx/config.hpp"
#include "pcvx/env.hpp"
#include "pcvx/mdp.hpp"

namespace pcvx {

namespace {

SelftestResult check(const std::string& name, bool ok, const std::string& detail = "") {
  return SelftestResult{name, ok, detail};
}

// The reward every agent stores for a step must be one common scalar; here
// each agent recomputes it independently from the step outcome.
SelftestResult common_reward_equality() {
  EnvConfig env_cfg;
  env_cfg.num_v2n = 2;
  RewardWeights weights;
  Rng rng(99);
  bool ok = true;
  for (int trial = 0; trial < 5 && ok; ++trial) {
    EpisodeState state = reset_episode(env_cfg, rng);
    Rng action_rng(trial + 1);
    while (!state.done) {
      const auto remaining_before = state.payload.remaining_bits;
      const int steps_before = state.payload.steps_elapsed;
      const StepOutcome outcome = step(state, random_step(state, action_rng));
      std::vector<double> rewards;
      for (int n = 0; n < env_cfg.num_platoons; ++n) {
        const auto utilities =
            collect_utilities(env_cfg, outcome.v2v_rates, remaining_before, weights);
        rewards.push_back(
            compute_reward(outcome.v2n_rates, utilities, steps_before, weights, env_cfg));
      }
      for (double r : rewards)
        if (r != rewards.front()) ok = false;
    }
  }
  return check("common reward identical across agents", ok);
}

SelftestResult replay_fifo() {
  ReplayBuffer buffer(2);
  for (int k = 0; k < 3; ++k) {
    Experience e;
    e.action = k;
    e.terminal = true;
    buffer.push(std::move(e));
  }
  bool ok = buffer.size() == 2 && buffer.at(0).action == 1 && buffer.at(1).action == 2;
  return check("replay buffer FIFO eviction", ok);
}

SelftestResult replay_uniformity() {
  ReplayBuffer buffer(128);
  for (int k = 0; k < 100; ++k) {
    Experience e;
    e.action = k;
    e.terminal = true;
    buffer.push(std::move(e));
  }
  Rng rng(7);
  std::vector<int> counts(100, 0);
  const int draws = 100000;
  for (int d = 0; d < draws; ++d) counts[buffer.sample(1, rng)[0]->action] += 1;
  bool ok = true;
  for (int c : counts)
    if (std::abs(c / static_cast<double>(draws) - 0.01) > 0.003) ok = false;
  return check("replay sampling uniform", ok);
}

SelftestResult epsilon_greedy_distribution() {
  const std::vector<double> q = {0.1, 0.9, 0.4, 0.2, 0.0, -1.0, 0.3, 0.6};
  bool ok = true;
  std::ostringstream detail;
  for (double epsilon : {0.25, 0.5}) {
    Rng rng(static_cast<std::uint64_t>(epsilon * 1000));
    std::vector<int> counts(q.size(), 0);
    const int draws = 100000;
    for (int d = 0; d < draws; ++d) counts[select_action(q, epsilon, rng)] += 1;
    for (std::size_t a = 0; a < q.size(); ++a) {
      const double expected = epsilon / q.size() + (a == 1 ? 1.0 - epsilon : 0.0);
      if (std::abs(counts[a] / static_cast<double>(draws) - expected) > 0.01) {
        ok = false;
        detail << "eps=" << epsilon << " action=" << a << " off-target ";
      }
    }
  }
  return check("epsilon-greedy action distribution", ok, detail.str());
}

SelftestResult action_bijection() {
  EnvConfig cfg;
  cfg.num_v2n = 2;
  bool ok = true;
  std::vector<bool> seen(action_count(cfg), false);
  for (int s = 0; s < cfg.num_v2n; ++s)
    for (int p = 0; p < cfg.power_level_count(); ++p) {
      const int flat = encode_action(Action{s, p}, cfg);
      if (flat < 0 || flat >= action_count(cfg) || seen[flat]) ok = false;
      else seen[flat] = true;
      if (!(decode_action(flat, cfg) == Action{s, p})) ok = false;
    }
  for (bool s : seen) ok = ok && s;
  return check("action encode/decode bijection", ok);
}

// remaining(t+1) must equal max(0, remaining(t) - rate * dt) bit for bit.
SelftestResult payload_accounting() {
  EnvConfig env_cfg;
  env_cfg.payload_bits = 3.0 * 1060.0 * 8.0;
  Rng rng(123);
  bool ok = true;
  for (int trial = 0; trial < 5 && ok; ++trial) {
    EpisodeState state = reset_episode(env_cfg, rng);
    auto expected = state.payload.remaining_bits;
    Rng action_rng(trial);
    while (!state.done) {
      const StepOutcome outcome = step(state, random_step(state, action_rng));
      const double dt = env_cfg.step_ms * 1e-3;
      for (int n = 0; n < env_cfg.num_platoons; ++n)
        for (int i = 0; i < env_cfg.members_per_platoon; ++i) {
          expected[n][i] = std::max(0.0, expected[n][i] - outcome.v2v_rates[n][i] * dt);
          if (expected[n][i] != outcome.payload.remaining_bits[n][i]) ok = false;
        }
    }
  }
  return check("payload accounting exact", ok);
}

}  // namespace

std::vector<SelftestResult> run_selftest_checks() {
  return {common_reward_equality(), replay_fifo(),          replay_uniformity(),
          epsilon_greedy_distribution(), action_bijection(), payload_accounting()};
}

bool run_selftest(std::ostream& out) {
  bool all = true;
  for (const SelftestResult& r : run_selftest_checks()) {
    out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name;
    if (!r.detail.empty()) out << " (" << r.detail << ")";
    out << "\n";
    all = all && r.passed;
  }
  return all;
}

}  // namespace pcvx
