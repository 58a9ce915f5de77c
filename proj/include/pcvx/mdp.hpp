// Agent-side view of the environment: local observation vectors, the flat
// discrete action encoding, and the common reward shared by all agents.
#pragma once

#include <vector>

#include "pcvx/action.hpp"
#include "pcvx/env.hpp"

namespace pcvx {

// Observation layout, all entries finite:
//   [0, V)            direct leader->member gains (dB, standardized)
//   [V, V + V*(N-1))  co-channel interferer gains from the last step, member-
//                     major then other platoons ascending; zero when the
//                     interferer was on another sub-band or silent
//   ... V*M           V2N-user -> member gains, member-major then sub-band
//   ... M             own leader -> BS gain per candidate sub-band
//   ... 1             remaining payload, sum over members / (V*B)
//   ... 1             remaining time / T
//   ... 2             fingerprint: training progress e/E and epsilon
struct Observation {
  std::vector<double> values;
};

struct RewardWeights {
  double w_c = 0.7;
  double w_d = 0.3;
  double w_t = 0.25;
  double fixed_utility = 50.0;  // U, paid per delivered link
};

int observation_dim(const EnvConfig& cfg);
int action_count(const EnvConfig& cfg);  // M * |A_p|

// Flat action index <-> (sub_band, power_level); sub-band is the high digit.
int encode_action(const Action& a, const EnvConfig& cfg);
Action decode_action(int index, const EnvConfig& cfg);

// Channel features enter in dB standardized by fixed affine constants so the
// mapping is stateless and reproducible across runs.
double standardize_gain(double linear_gain);

// Local state of agent n, built from the previous step's measurements.
// Requires platoon n active.
Observation build_observation(const EpisodeState& state, int n, double episode_progress,
                              double epsilon);

// Per-link ingredient of the reward: spectral efficiency while payload
// remains (remaining_bits taken before the step's decrement), the fixed
// bonus U from the first step after delivery on.
double v2v_utility(double rate_bps, double remaining_bits, double fixed_utility,
                   double bandwidth_hz);

// Common scalar reward broadcast to every agent. steps_elapsed counts the
// steps completed before the one being rewarded, so the first step of an
// episode carries no time penalty.
double compute_reward(const std::vector<double>& v2n_rates_bps,
                      const std::vector<double>& v2v_utilities, int steps_elapsed,
                      const RewardWeights& weights, const EnvConfig& cfg);

// Utilities for every (n, i) link given the step's rates and the pre-step
// payload snapshot.
std::vector<double> collect_utilities(const EnvConfig& cfg,
                                      const std::vector<std::vector<double>>& v2v_rates_bps,
                                      const std::vector<std::vector<double>>& remaining_before,
                                      const RewardWeights& weights);

}  // namespace pcvx
