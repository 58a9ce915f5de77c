// Centralized reference allocators: per-step exhaustive search over the
// joint action space (upper reference, needs global gains) and uniform
// random selection (lower reference).
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pcvx/env.hpp"
#include "pcvx/rng.hpp"

namespace pcvx {

struct ExhaustiveResult {
  std::vector<std::optional<Action>> joint_action;  // one entry per platoon
  double objective = 0.0;        // sum of V2N and undelivered V2V rates, bits/s
  std::uint64_t candidates = 0;  // joint actions evaluated
};

// Scans every (sub-band, power) combination of the active platoons and
// returns the joint action maximizing the current-step sum-rate; links whose
// payload already drained contribute nothing. Ties break towards the lowest
// flat joint index (earlier platoons are the most significant digit).
// Throws std::length_error when the candidate count exceeds max_candidates.
ExhaustiveResult exhaustive_step(const EpisodeState& state,
                                 std::uint64_t max_candidates = 1u << 20);

// Each active platoon draws sub-band and power level independently and
// uniformly.
std::vector<std::optional<Action>> random_step(const EpisodeState& state, Rng& rng);

}  // namespace pcvx
