#include "pcvx/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pcvx {

namespace {

// Stream tags for deriving independent rng streams from the master seed.
constexpr std::uint64_t kTrainEnvStream = 1;
constexpr std::uint64_t kTrainPolicyStream = 2;
constexpr std::uint64_t kInitStream = 3;
constexpr std::uint64_t kEvalEnvStream = 10;
constexpr std::uint64_t kEvalAllocStream = 11;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string metrics_csv_header() {
  return "payload_bytes,M,allocator,avg_v2n_rate_bps,delivery_probability,episodes,seed";
}

std::string to_csv_row(const MetricsRecord& r) {
  std::ostringstream out;
  out << format_double(r.payload_bytes) << ',' << r.m << ',' << r.allocator << ','
      << format_double(r.avg_v2n_rate_bps) << ',' << format_double(r.delivery_probability)
      << ',' << r.episodes << ',' << r.seed;
  return out.str();
}

MetricsRecord from_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (fields.size() != 7)
    throw std::runtime_error("metrics row has " + std::to_string(fields.size()) +
                             " fields, expected 7: " + line);
  MetricsRecord r;
  r.payload_bytes = std::stod(fields[0]);
  r.m = std::stoi(fields[1]);
  r.allocator = fields[2];
  r.avg_v2n_rate_bps = std::stod(fields[3]);
  r.delivery_probability = std::stod(fields[4]);
  r.episodes = std::stoi(fields[5]);
  r.seed = std::stoull(fields[6]);
  return r;
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write metrics file: " + path);
  out << metrics_csv_header() << '\n';
  for (const MetricsRecord& r : records) out << to_csv_row(r) << '\n';
}

std::vector<MetricsRecord> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read metrics file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != metrics_csv_header())
    throw std::runtime_error("bad metrics header in " + path);
  std::vector<MetricsRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(from_csv_row(line));
  }
  return records;
}

MetricsRecord compute_metrics(const std::vector<EpisodeOutcomeSummary>& episodes,
                              double payload_bytes, int m, const std::string& allocator,
                              std::uint64_t seed) {
  if (episodes.empty()) throw std::invalid_argument("compute_metrics: no episodes");
  double rate_sum = 0.0;
  std::size_t rate_count = 0;
  long long delivered = 0, total = 0;
  for (const EpisodeOutcomeSummary& ep : episodes) {
    for (const auto& step_rates : ep.v2n_rates_per_step)
      for (double r : step_rates) {
        rate_sum += r;
        ++rate_count;
      }
    delivered += ep.delivered_links;
    total += ep.total_links;
  }
  MetricsRecord record;
  record.payload_bytes = payload_bytes;
  record.m = m;
  record.allocator = allocator;
  record.avg_v2n_rate_bps = rate_count ? rate_sum / static_cast<double>(rate_count) : 0.0;
  record.delivery_probability = total ? static_cast<double>(delivered) / total : 0.0;
  record.episodes = static_cast<int>(episodes.size());
  record.seed = seed;
  return record;
}

TrainingSummary run_training(const ExperimentConfig& cfg, std::ostream* progress) {
  cfg.env.validate();
  std::filesystem::create_directories(cfg.output_dir);
  const std::string log_path =
      (std::filesystem::path(cfg.output_dir) / "training_log.jsonl").string();
  std::ofstream log(log_path);
  if (!log) throw std::runtime_error("cannot write training log: " + log_path);

  Rng init_rng(mix_seed(cfg.seed, kInitStream));
  Rng env_rng(mix_seed(cfg.seed, kTrainEnvStream));
  Rng policy_rng(mix_seed(cfg.seed, kTrainPolicyStream));
  std::vector<Agent> agents = make_agents(cfg.env, cfg.train, init_rng);

  TrainingSummary summary;
  summary.episodes = cfg.train.episodes;
  for (int episode = 0; episode < cfg.train.episodes; ++episode) {
    const EpisodeStats stats = run_training_episode(agents, cfg.env, cfg.train, cfg.reward,
                                                    episode, env_rng, policy_rng);
    nlohmann::json entry;
    entry["episode"] = episode;
    entry["epsilon"] = stats.epsilon;
    entry["reward"] = stats.reward_sum;
    entry["steps"] = stats.steps;
    entry["delivered_links"] = stats.delivered_links;
    nlohmann::json losses = nlohmann::json::array();
    for (double l : stats.losses)
      losses.push_back(std::isfinite(l) ? nlohmann::json(l) : nlohmann::json(nullptr));
    entry["losses"] = losses;
    log << entry.dump() << '\n';

    summary.final_epsilon = stats.epsilon;
    summary.last_reward_sum = stats.reward_sum;
    if (progress && (episode + 1) % 200 == 0)
      *progress << "episode " << episode + 1 << "/" << cfg.train.episodes
                << " eps=" << stats.epsilon << " reward=" << stats.reward_sum << "\n";
  }
  save_agents(cfg.output_dir, agents, cfg);
  return summary;
}

std::vector<std::optional<Action>> rl_step(const EpisodeState& state,
                                           const std::vector<Agent>& agents) {
  const EnvConfig& cfg = state.cfg;
  std::vector<std::optional<Action>> joint(cfg.num_platoons, std::nullopt);
  Rng unused(0);  // epsilon = 0 never consumes randomness
  for (int n = 0; n < cfg.num_platoons; ++n) {
    if (!state.payload.active[n]) continue;
    // Fingerprint frozen at end of training: progress 1, epsilon 0.
    const Observation obs = build_observation(state, n, 1.0, 0.0);
    const std::vector<double> q = mlp_forward(agents[n].online, obs.values);
    joint[n] = decode_action(select_action(q, 0.0, unused), cfg);
  }
  return joint;
}

std::vector<MetricsRecord> run_evaluation(const ExperimentConfig& cfg, Allocator allocator,
                                          const std::vector<Agent>* agents,
                                          const std::vector<double>& payload_bytes_list,
                                          std::ostream* progress) {
  if (allocator == Allocator::kRl && !agents)
    throw std::invalid_argument("run_evaluation: rl allocator needs trained agents");

  std::vector<MetricsRecord> records;
  for (double payload_bytes : payload_bytes_list) {
    EnvConfig env_cfg = cfg.env;
    env_cfg.payload_bits = payload_bytes * 8.0;
    env_cfg.validate();

    std::vector<EpisodeOutcomeSummary> outcomes;
    outcomes.reserve(cfg.eval_episodes);
    const Assignment silent = make_assignment(
        env_cfg, std::vector<std::optional<Action>>(env_cfg.num_platoons, std::nullopt));

    for (int episode = 0; episode < cfg.eval_episodes; ++episode) {
      // Identical channel realizations for every allocator and payload point.
      Rng env_rng(mix_seed(mix_seed(cfg.seed, kEvalEnvStream), episode));
      Rng alloc_rng(mix_seed(mix_seed(cfg.seed, kEvalAllocStream), episode));
      EpisodeState state = reset_episode(env_cfg, env_rng);

      EpisodeOutcomeSummary summary;
      double bound_sum = 0.0, actual_sum = 0.0;
      while (!state.done) {
        std::vector<std::optional<Action>> joint;
        switch (allocator) {
          case Allocator::kRl: joint = rl_step(state, *agents); break;
          case Allocator::kExhaustive:
            joint = exhaustive_step(state, cfg.exhaustive_cap).joint_action;
            break;
          case Allocator::kRandom: joint = random_step(state, alloc_rng); break;
        }
        for (double r : rates_for_assignment(env_cfg, state.gains, silent).v2n) bound_sum += r;
        const StepOutcome outcome = step(state, joint);
        for (double r : outcome.v2n_rates) actual_sum += r;
        summary.v2n_rates_per_step.push_back(outcome.v2n_rates);
      }
      // V2N uplinks keep transmitting for the whole latency window even when
      // every platoon finished early.
      for (auto& tail_rates : v2n_tail_rates(state)) {
        for (double r : tail_rates) {
          actual_sum += r;
          bound_sum += r;
        }
        summary.v2n_rates_per_step.push_back(std::move(tail_rates));
      }
      if (actual_sum > bound_sum * (1.0 + 1e-12))
        throw std::logic_error("evaluation: V2N rate exceeded the interference-free bound");

      summary.delivered_links = state.payload.delivered_links();
      summary.total_links = state.payload.total_links();
      outcomes.push_back(std::move(summary));
    }
    records.push_back(compute_metrics(outcomes, payload_bytes, env_cfg.num_v2n,
                                      allocator_name(allocator), cfg.seed));
    if (progress)
      *progress << allocator_name(allocator) << " B=" << payload_bytes
                << "B: avg_v2n=" << records.back().avg_v2n_rate_bps
                << " delivery=" << records.back().delivery_probability << "\n";
  }
  return records;
}

}  // namespace pcvx
