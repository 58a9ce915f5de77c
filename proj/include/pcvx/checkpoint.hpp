// Agent checkpoints: a versioned JSON container holding the layer sizes,
// weights, biases, optimizer state and a config fingerprint. Round-trips
// losslessly: a reloaded agent produces bit-identical Q values.
#pragma once

#include <string>
#include <vector>

#include "pcvx/agent.hpp"
#include "pcvx/config.hpp"

namespace pcvx {

// <dir>/agent_<n>.ckpt
std::string checkpoint_path(const std::string& dir, int agent_id);

void save_checkpoint(const std::string& path, const Agent& agent,
                     const ExperimentConfig& cfg);

// Throws std::runtime_error naming the path when missing/corrupt, or when
// the stored fingerprint disagrees with the current config (M, N, member
// count, action space or network shape).
Agent load_checkpoint(const std::string& path, const ExperimentConfig& cfg);

void save_agents(const std::string& dir, const std::vector<Agent>& agents,
                 const ExperimentConfig& cfg);
std::vector<Agent> load_agents(const std::string& dir, const ExperimentConfig& cfg);

}  // namespace pcvx
