// Experiment configuration: a flat sectioned key/value file (TOML-like
// subset: [section], key = value, numbers, [..] lists, quoted strings,
// # comments). Every constant has a built-in default; a config file only
// overrides what it names. Unknown keys are rejected.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcvx/agent.hpp"
#include "pcvx/env.hpp"
#include "pcvx/mdp.hpp"

namespace pcvx {

enum class Allocator { kRl, kExhaustive, kRandom };

std::string allocator_name(Allocator a);
Allocator parse_allocator(const std::string& name);  // throws on unknown names

struct ExperimentConfig {
  EnvConfig env;                // env.payload_bits is the training payload
  TrainConfig train;
  RewardWeights reward;

  int eval_episodes = 100;
  std::vector<double> payload_sweep_bytes = {2 * 1060.0, 4 * 1060.0,  6 * 1060.0,
                                             8 * 1060.0, 10 * 1060.0, 12 * 1060.0};
  std::uint64_t exhaustive_cap = 1u << 20;

  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::vector<Allocator> allocators = {Allocator::kRl, Allocator::kExhaustive,
                                       Allocator::kRandom};
};

// Parses a config file into defaults-overridden ExperimentConfig.
// Throws std::runtime_error with a line diagnostic on malformed input or
// unknown keys.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// The full default configuration, serialized in the accepted file format.
std::string default_config_text();

}  // namespace pcvx
