// Experiment orchestration: the training loop, the payload-sweep evaluation
// used for the rate/delivery figures, metric aggregation and the CSV /
// JSON-lines result files.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pcvx/agent.hpp"
#include "pcvx/baselines.hpp"
#include "pcvx/checkpoint.hpp"
#include "pcvx/config.hpp"

namespace pcvx {

struct MetricsRecord {
  double payload_bytes = 0.0;
  int m = 0;
  std::string allocator;
  double avg_v2n_rate_bps = 0.0;     // mean over links, steps and episodes
  double delivery_probability = 0.0; // delivered links / total links
  int episodes = 0;
  std::uint64_t seed = 0;

  bool operator==(const MetricsRecord&) const = default;
};

std::string metrics_csv_header();
std::string to_csv_row(const MetricsRecord& record);      // lossless doubles
MetricsRecord from_csv_row(const std::string& line);      // throws on malformed rows
void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> read_metrics_csv(const std::string& path);

// One finished evaluation episode: the V2N rate vector of every step of the
// full latency window plus the final delivery counts.
struct EpisodeOutcomeSummary {
  std::vector<std::vector<double>> v2n_rates_per_step;  // [steps][M] bits/s
  int delivered_links = 0;
  int total_links = 0;
};

// Aggregates episodes into one record; requires at least one episode.
MetricsRecord compute_metrics(const std::vector<EpisodeOutcomeSummary>& episodes,
                              double payload_bytes, int m, const std::string& allocator,
                              std::uint64_t seed);

struct TrainingSummary {
  int episodes = 0;
  double final_epsilon = 0.0;
  double last_reward_sum = 0.0;
};

// Trains one agent per platoon at the configured training payload, appends a
// JSON-lines record per episode to <out>/training_log.jsonl and writes final
// checkpoints to <out>/agent_<n>.ckpt. Deterministic given the seed.
TrainingSummary run_training(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

// Evaluates one allocator over the payload sweep, one record per payload.
// Episode channel realizations depend only on (seed, episode index), so
// every allocator and payload sees identical drops and fading. RL runs
// greedily (epsilon = 0) with the fingerprint frozen at end of training;
// `agents` may be null for the baseline allocators.
std::vector<MetricsRecord> run_evaluation(const ExperimentConfig& cfg, Allocator allocator,
                                          const std::vector<Agent>* agents,
                                          const std::vector<double>& payload_bytes_list,
                                          std::ostream* progress = nullptr);

// Greedy joint action of the trained agents for the current step.
std::vector<std::optional<Action>> rl_step(const EpisodeState& state,
                                           const std::vector<Agent>& agents);

}  // namespace pcvx
