#include "pcvx/mdp.hpp"

#include <cmath>
#include <stdexcept>

namespace pcvx {

namespace {
// Fixed affine standardization for dB-domain gain features.
constexpr double kGainMeanDb = -100.0;
constexpr double kGainScaleDb = 30.0;
constexpr double kGainFloor = 1e-30;  // keeps log10 finite
}  // namespace

int observation_dim(const EnvConfig& cfg) {
  const int v = cfg.members_per_platoon;
  return v + v * (cfg.num_platoons - 1) + v * cfg.num_v2n + cfg.num_v2n + 2 + 2;
}

int action_count(const EnvConfig& cfg) { return cfg.num_v2n * cfg.power_level_count(); }

int encode_action(const Action& a, const EnvConfig& cfg) {
  if (a.sub_band < 0 || a.sub_band >= cfg.num_v2n || a.power_level < 0 ||
      a.power_level >= cfg.power_level_count())
    throw std::out_of_range("encode_action: action outside the action space");
  return a.sub_band * cfg.power_level_count() + a.power_level;
}

Action decode_action(int index, const EnvConfig& cfg) {
  if (index < 0 || index >= action_count(cfg))
    throw std::out_of_range("decode_action: flat index outside the action space");
  return Action{index / cfg.power_level_count(), index % cfg.power_level_count()};
}

double standardize_gain(double linear_gain) {
  const double db = 10.0 * std::log10(std::max(linear_gain, kGainFloor));
  return (db - kGainMeanDb) / kGainScaleDb;
}

Observation build_observation(const EpisodeState& state, int n, double episode_progress,
                              double epsilon) {
  const EnvConfig& cfg = state.cfg;
  if (n < 0 || n >= cfg.num_platoons)
    throw std::out_of_range("build_observation: bad agent index");
  if (!state.payload.active[n])
    throw std::logic_error("build_observation: platoon already finished");

  const int v = cfg.members_per_platoon;
  const LinkGains& g = state.gains;
  const SmallScaleSet& meas = state.last_small;

  Observation obs;
  obs.values.reserve(observation_dim(cfg));

  // Direct channels, measured last step.
  for (int i = 0; i < v; ++i)
    obs.values.push_back(
        standardize_gain(combined_gain(g.dd[n][n * v + i], meas.dd[n][n * v + i])));

  // Interference from leaders that shared our sub-band last step. Before the
  // first transmission (or for silent/off-band leaders) the entry is zero.
  int own_band = -1;
  if (state.last_assignment) own_band = state.last_assignment->sub_band[n];
  for (int i = 0; i < v; ++i) {
    for (int l = 0; l < cfg.num_platoons; ++l) {
      if (l == n) continue;
      const bool co_channel =
          own_band >= 0 && state.last_assignment->transmits_on(l, own_band);
      obs.values.push_back(
          co_channel
              ? standardize_gain(combined_gain(g.dd[l][n * v + i], meas.dd[l][n * v + i]))
              : 0.0);
    }
  }

  // V2N users towards our receivers, every sub-band.
  for (int i = 0; i < v; ++i)
    for (int m = 0; m < cfg.num_v2n; ++m)
      obs.values.push_back(
          standardize_gain(combined_gain(g.cd[m][n * v + i], meas.cd[m][n * v + i])));

  // Our own interference channel towards the BS per candidate sub-band.
  for (int m = 0; m < cfg.num_v2n; ++m)
    obs.values.push_back(standardize_gain(combined_gain(g.dc[n], meas.dc[n][m])));

  double remaining = 0.0;
  for (int i = 0; i < v; ++i) remaining += state.payload.remaining_bits[n][i];
  const double full = v * cfg.payload_bits;
  obs.values.push_back(full > 0.0 ? remaining / full : 0.0);
  obs.values.push_back(1.0 - static_cast<double>(state.payload.steps_elapsed) /
                                 cfg.steps_per_episode());

  obs.values.push_back(episode_progress);
  obs.values.push_back(epsilon);
  return obs;
}

double v2v_utility(double rate_bps, double remaining_bits, double fixed_utility,
                   double bandwidth_hz) {
  if (remaining_bits <= 0.0) return fixed_utility;
  return rate_bps / bandwidth_hz;
}

double compute_reward(const std::vector<double>& v2n_rates_bps,
                      const std::vector<double>& v2v_utilities, int steps_elapsed,
                      const RewardWeights& weights, const EnvConfig& cfg) {
  double v2n_sum = 0.0;
  for (double r : v2n_rates_bps) v2n_sum += r / cfg.bandwidth_hz;
  double utility_sum = 0.0;
  for (double u : v2v_utilities) utility_sum += u;
  const double elapsed_ms = steps_elapsed * cfg.step_ms;
  return weights.w_c * v2n_sum + weights.w_d * utility_sum - weights.w_t * elapsed_ms;
}

std::vector<double> collect_utilities(const EnvConfig& cfg,
                                      const std::vector<std::vector<double>>& v2v_rates_bps,
                                      const std::vector<std::vector<double>>& remaining_before,
                                      const RewardWeights& weights) {
  std::vector<double> utilities;
  utilities.reserve(cfg.num_platoons * cfg.members_per_platoon);
  for (int n = 0; n < cfg.num_platoons; ++n)
    for (int i = 0; i < cfg.members_per_platoon; ++i)
      utilities.push_back(v2v_utility(v2v_rates_bps[n][i], remaining_before[n][i],
                                      weights.fixed_utility, cfg.bandwidth_hz));
  return utilities;
}

}  // namespace pcvx
