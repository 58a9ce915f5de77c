// Per-platoon double-DQN machinery: replay memory, epsilon-greedy selection,
// double-Q targets and the centralized per-episode training pass. Each agent
// owns its own networks, optimizer state and buffer; nothing is shared.
#pragma once

#include <cstddef>
#include <vector>

#include "pcvx/env.hpp"
#include "pcvx/mdp.hpp"
#include "pcvx/mlp.hpp"
#include "pcvx/rng.hpp"

namespace pcvx {

struct Experience {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;  // unused when terminal
  bool terminal = false;
};

// Fixed-capacity ring buffer, oldest experience evicted first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Experience exp);
  std::size_t size() const { return store_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Experience& at(std::size_t i) const;  // 0 = oldest

  // Uniform with replacement; throws when fewer than k entries are stored.
  std::vector<const Experience*> sample(std::size_t k, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next write slot once full
  std::vector<Experience> store_;
};

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.02;
  double decay_fraction = 0.8;  // of total episodes spent decaying linearly

  double at(int episode, int total_episodes) const;
};

struct TrainConfig {
  int episodes = 2000;
  double gamma = 0.95;
  double learning_rate = 0.001;
  double rmsprop_decay = 0.9;
  int batch_size = 64;
  std::size_t buffer_capacity = 50000;
  int target_sync_period = 100;  // episodes
  int updates_per_episode = 1;
  // Targets are scaled before regression so early Q outputs are not dwarfed
  // by the delivered-payload bonus; pure preprocessing, the reward itself
  // is unchanged.
  double reward_scale = 0.01;
  std::vector<int> hidden_sizes = {100, 50, 24};
  EpsilonSchedule epsilon;
};

// Epsilon-greedy over a Q row; greedy ties resolve to the lowest index.
int select_action(std::span<const double> q_values, double epsilon, Rng& rng);

// r + gamma * Q_target(s', argmax_a Q_online(s', a)), or r when terminal.
double double_q_target(const MlpParams& online, const MlpParams& target,
                       const Experience& exp, double gamma);

struct Agent {
  int id = 0;
  MlpParams online;
  MlpParams target;
  RmsPropState optimizer;
  ReplayBuffer buffer;
  Rng replay_rng;

  Agent(int id, const std::vector<int>& layer_sizes, std::size_t buffer_capacity,
        std::uint64_t replay_seed);
};

// target becomes a deep copy of online.
void sync_target(const MlpParams& online, MlpParams& target);

std::vector<Agent> make_agents(const EnvConfig& env_cfg, const TrainConfig& train_cfg,
                               Rng& init_rng);

struct EpisodeStats {
  double reward_sum = 0.0;
  std::vector<double> losses;  // per agent; NaN while the buffer is warming up
  double epsilon = 0.0;
  int steps = 0;
  int delivered_links = 0;
};

// Runs one centralized training episode: every active agent picks an
// epsilon-greedy action, the environment advances on the joint action, the
// common reward is broadcast, and afterwards each agent applies its RMSProp
// update(s) from a uniformly sampled mini-batch.
EpisodeStats run_training_episode(std::vector<Agent>& agents, const EnvConfig& env_cfg,
                                  const TrainConfig& train_cfg, const RewardWeights& weights,
                                  int episode_index, Rng& env_rng, Rng& policy_rng);

}  // namespace pcvx
