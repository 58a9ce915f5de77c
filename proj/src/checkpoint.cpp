#include "pcvx/checkpoint.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace pcvx {

namespace {

using nlohmann::json;

json fingerprint(const ExperimentConfig& cfg) {
  return json{{"num_v2n", cfg.env.num_v2n},
              {"num_platoons", cfg.env.num_platoons},
              {"members_per_platoon", cfg.env.members_per_platoon},
              {"power_levels_dbm", cfg.env.power_levels_dbm},
              {"observation_dim", observation_dim(cfg.env)},
              {"action_count", action_count(cfg.env)},
              {"train_episodes", cfg.train.episodes}};
}

}  // namespace

std::string checkpoint_path(const std::string& dir, int agent_id) {
  return (std::filesystem::path(dir) / ("agent_" + std::to_string(agent_id) + ".ckpt")).string();
}

void save_checkpoint(const std::string& path, const Agent& agent,
                     const ExperimentConfig& cfg) {
  json doc;
  doc["format"] = "pcvx-agent-checkpoint";
  doc["version"] = 1;
  doc["agent_id"] = agent.id;
  doc["layer_sizes"] = agent.online.layer_sizes;
  doc["weights"] = agent.online.weights;
  doc["biases"] = agent.online.biases;
  doc["target_weights"] = agent.target.weights;
  doc["target_biases"] = agent.target.biases;
  doc["rmsprop_weights"] = agent.optimizer.weights;
  doc["rmsprop_biases"] = agent.optimizer.biases;
  doc["fingerprint"] = fingerprint(cfg);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << doc.dump(1, '\t') << "\n";
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

Agent load_checkpoint(const std::string& path, const ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing checkpoint: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw std::runtime_error("corrupt checkpoint " + path + ": " + e.what());
  }
  if (doc.value("format", "") != "pcvx-agent-checkpoint" || doc.value("version", 0) != 1)
    throw std::runtime_error("unrecognized checkpoint format: " + path);
  // Interface compatibility only; the training episode count is recorded as
  // provenance but an eval config is free to differ there.
  const json want = fingerprint(cfg);
  const json got = doc.at("fingerprint");
  for (const char* field : {"num_v2n", "num_platoons", "members_per_platoon",
                            "power_levels_dbm", "observation_dim", "action_count"})
    if (got.value(field, json{}) != want.at(field))
      throw std::runtime_error("checkpoint " + path +
                               " was trained for a different configuration");

  const std::vector<int> sizes = doc["layer_sizes"].get<std::vector<int>>();
  if (sizes.size() < 2 || sizes.front() != observation_dim(cfg.env) ||
      sizes.back() != action_count(cfg.env))
    throw std::runtime_error("checkpoint " + path + " has an incompatible network shape");
  Agent agent(doc["agent_id"].get<int>(), sizes, cfg.train.buffer_capacity,
              /*replay_seed=*/0);
  agent.online.weights = doc["weights"].get<std::vector<std::vector<double>>>();
  agent.online.biases = doc["biases"].get<std::vector<std::vector<double>>>();
  agent.target.weights = doc["target_weights"].get<std::vector<std::vector<double>>>();
  agent.target.biases = doc["target_biases"].get<std::vector<std::vector<double>>>();
  agent.optimizer.weights = doc["rmsprop_weights"].get<std::vector<std::vector<double>>>();
  agent.optimizer.biases = doc["rmsprop_biases"].get<std::vector<std::vector<double>>>();

  if (agent.online.weights.size() + 1 != sizes.size() ||
      agent.online.biases.size() + 1 != sizes.size())
    throw std::runtime_error("checkpoint " + path + " has inconsistent layer shapes");
  for (int l = 0; l < agent.online.layer_count(); ++l) {
    const std::size_t expected = static_cast<std::size_t>(sizes[l + 1]) * sizes[l];
    if (agent.online.weights[l].size() != expected ||
        agent.online.biases[l].size() != static_cast<std::size_t>(sizes[l + 1]))
      throw std::runtime_error("checkpoint " + path + " has inconsistent layer shapes");
  }
  return agent;
}

void save_agents(const std::string& dir, const std::vector<Agent>& agents,
                 const ExperimentConfig& cfg) {
  std::filesystem::create_directories(dir);
  for (const Agent& agent : agents) save_checkpoint(checkpoint_path(dir, agent.id), agent, cfg);
}

std::vector<Agent> load_agents(const std::string& dir, const ExperimentConfig& cfg) {
  std::vector<Agent> agents;
  for (int n = 0; n < cfg.env.num_platoons; ++n)
    agents.push_back(load_checkpoint(checkpoint_path(dir, n), cfg));
  return agents;
}

}  // namespace pcvx
