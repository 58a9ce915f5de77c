#include "pcvx/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pcvx {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: zero capacity");
  store_.reserve(std::min<std::size_t>(capacity, 4096));
}

void ReplayBuffer::push(Experience exp) {
  if (store_.size() < capacity_) {
    store_.push_back(std::move(exp));
  } else {
    store_[head_] = std::move(exp);
    head_ = (head_ + 1) % capacity_;
  }
}

const Experience& ReplayBuffer::at(std::size_t i) const {
  if (i >= store_.size()) throw std::out_of_range("ReplayBuffer::at");
  if (store_.size() < capacity_) return store_[i];
  return store_[(head_ + i) % capacity_];
}

std::vector<const Experience*> ReplayBuffer::sample(std::size_t k, Rng& rng) const {
  if (store_.size() < k)
    throw std::logic_error("ReplayBuffer::sample: fewer entries than requested");
  std::vector<const Experience*> batch;
  batch.reserve(k);
  for (std::size_t j = 0; j < k; ++j)
    batch.push_back(&store_[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(store_.size())))]);
  return batch;
}

double EpsilonSchedule::at(int episode, int total_episodes) const {
  const double decay_span = decay_fraction * total_episodes;
  if (decay_span <= 0.0) return end;
  if (episode >= decay_span) return end;
  return start + (end - start) * (episode / decay_span);
}

int select_action(std::span<const double> q_values, double epsilon, Rng& rng) {
  if (q_values.empty()) throw std::invalid_argument("select_action: empty Q row");
  if (epsilon < 0.0 || epsilon > 1.0)
    throw std::invalid_argument("select_action: epsilon outside [0,1]");
  if (epsilon > 0.0 && rng.uniform() < epsilon)
    return rng.uniform_int(static_cast<int>(q_values.size()));
  int best = 0;
  for (int a = 1; a < static_cast<int>(q_values.size()); ++a)
    if (q_values[a] > q_values[best]) best = a;
  return best;
}

double double_q_target(const MlpParams& online, const MlpParams& target,
                       const Experience& exp, double gamma) {
  if (exp.terminal) return exp.reward;
  const std::vector<double> q_online = mlp_forward(online, exp.next_state);
  int best = 0;
  for (int a = 1; a < static_cast<int>(q_online.size()); ++a)
    if (q_online[a] > q_online[best]) best = a;
  const std::vector<double> q_target = mlp_forward(target, exp.next_state);
  return exp.reward + gamma * q_target[best];
}

Agent::Agent(int id_, const std::vector<int>& layer_sizes, std::size_t buffer_capacity,
             std::uint64_t replay_seed)
    : id(id_),
      online(make_mlp(layer_sizes)),
      target(make_mlp(layer_sizes)),
      optimizer(make_rmsprop_state(online)),
      buffer(buffer_capacity),
      replay_rng(replay_seed) {}

void sync_target(const MlpParams& online, MlpParams& target) { target = online; }

std::vector<Agent> make_agents(const EnvConfig& env_cfg, const TrainConfig& train_cfg,
                               Rng& init_rng) {
  std::vector<int> sizes;
  sizes.push_back(observation_dim(env_cfg));
  for (int h : train_cfg.hidden_sizes) sizes.push_back(h);
  sizes.push_back(action_count(env_cfg));

  std::vector<Agent> agents;
  agents.reserve(env_cfg.num_platoons);
  for (int n = 0; n < env_cfg.num_platoons; ++n) {
    Agent agent(n, sizes, train_cfg.buffer_capacity, init_rng.next_u64());
    init_params(agent.online, init_rng);
    sync_target(agent.online, agent.target);
    agents.push_back(std::move(agent));
  }
  return agents;
}

EpisodeStats run_training_episode(std::vector<Agent>& agents, const EnvConfig& env_cfg,
                                  const TrainConfig& train_cfg, const RewardWeights& weights,
                                  int episode_index, Rng& env_rng, Rng& policy_rng) {
  if (static_cast<int>(agents.size()) != env_cfg.num_platoons)
    throw std::invalid_argument("run_training_episode: one agent per platoon expected");

  const double epsilon = train_cfg.epsilon.at(episode_index, train_cfg.episodes);
  const double progress =
      train_cfg.episodes > 0 ? static_cast<double>(episode_index) / train_cfg.episodes : 0.0;

  EpisodeState env = reset_episode(env_cfg, env_rng);
  EpisodeStats stats;
  stats.epsilon = epsilon;

  while (!env.done) {
    std::vector<std::optional<Action>> joint(env_cfg.num_platoons);
    std::vector<Observation> observations(env_cfg.num_platoons);
    std::vector<bool> acted(env_cfg.num_platoons, false);
    for (int n = 0; n < env_cfg.num_platoons; ++n) {
      if (!env.payload.active[n]) continue;
      observations[n] = build_observation(env, n, progress, epsilon);
      const std::vector<double> q = mlp_forward(agents[n].online, observations[n].values);
      joint[n] = decode_action(select_action(q, epsilon, policy_rng), env_cfg);
      acted[n] = true;
    }

    const auto remaining_before = env.payload.remaining_bits;
    const int steps_before = env.payload.steps_elapsed;
    const StepOutcome outcome = step(env, joint);

    const std::vector<double> utilities =
        collect_utilities(env_cfg, outcome.v2v_rates, remaining_before, weights);
    const double reward =
        compute_reward(outcome.v2n_rates, utilities, steps_before, weights, env_cfg);
    stats.reward_sum += reward;
    stats.steps += 1;

    for (int n = 0; n < env_cfg.num_platoons; ++n) {
      if (!acted[n]) continue;
      Experience exp;
      exp.state = std::move(observations[n].values);
      exp.action = encode_action(*joint[n], env_cfg);
      exp.reward = reward;
      // An agent's trajectory ends when its payload completes or time runs
      // out; no bootstrapping past that point.
      exp.terminal = outcome.done || !env.payload.active[n];
      if (!exp.terminal)
        exp.next_state = build_observation(env, n, progress, epsilon).values;
      agents[n].buffer.push(std::move(exp));
    }
  }
  stats.delivered_links = env.payload.delivered_links();

  stats.losses.assign(agents.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t a = 0; a < agents.size(); ++a) {
    Agent& agent = agents[a];
    if (agent.buffer.size() < static_cast<std::size_t>(train_cfg.batch_size)) continue;
    double last_loss = 0.0;
    for (int u = 0; u < train_cfg.updates_per_episode; ++u) {
      const auto batch = agent.buffer.sample(train_cfg.batch_size, agent.replay_rng);
      std::vector<QSample> samples;
      samples.reserve(batch.size());
      for (const Experience* exp : batch) {
        // The networks regress scaled returns, so only the immediate reward
        // is rescaled here; the bootstrap term is already in scaled space.
        Experience scaled = *exp;
        scaled.reward *= train_cfg.reward_scale;
        const double target = double_q_target(agent.online, agent.target, scaled, train_cfg.gamma);
        samples.push_back(QSample{exp->state, exp->action, target});
      }
      const MlpGrads grads = q_gradient(agent.online, samples, &last_loss);
      rmsprop_step(agent.online, grads, agent.optimizer, train_cfg.learning_rate,
                   train_cfg.rmsprop_decay);
    }
    stats.losses[a] = last_loss;
  }

  if (train_cfg.target_sync_period > 0 &&
      (episode_index + 1) % train_cfg.target_sync_period == 0)
    for (Agent& agent : agents) sync_target(agent.online, agent.target);

  return stats;
}

}  // namespace pcvx
