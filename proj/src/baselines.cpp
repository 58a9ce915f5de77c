#include "pcvx/baselines.hpp"

#include <stdexcept>

namespace pcvx {

ExhaustiveResult exhaustive_step(const EpisodeState& state, std::uint64_t max_candidates) {
  const EnvConfig& cfg = state.cfg;
  std::vector<int> active;
  for (int n = 0; n < cfg.num_platoons; ++n)
    if (state.payload.active[n]) active.push_back(n);

  const std::uint64_t per_platoon =
      static_cast<std::uint64_t>(cfg.num_v2n) * cfg.power_level_count();
  std::uint64_t total = 1;
  for (std::size_t j = 0; j < active.size(); ++j) {
    if (total > max_candidates / per_platoon + 1)
      throw std::length_error(
          "exhaustive_step: joint action space too large; reduce platoons or raise the cap");
    total *= per_platoon;
  }
  if (total > max_candidates)
    throw std::length_error(
        "exhaustive_step: joint action space too large; reduce platoons or raise the cap");

  ExhaustiveResult best;
  best.joint_action.assign(cfg.num_platoons, std::nullopt);
  best.objective = -1.0;

  std::vector<std::optional<Action>> joint(cfg.num_platoons, std::nullopt);
  for (std::uint64_t index = 0; index < total; ++index) {
    // Mixed-radix decode, first active platoon most significant.
    std::uint64_t rem = index;
    for (std::size_t j = active.size(); j-- > 0;) {
      const int flat = static_cast<int>(rem % per_platoon);
      rem /= per_platoon;
      joint[active[j]] = Action{flat / cfg.power_level_count(), flat % cfg.power_level_count()};
    }

    const RateSet rates = rates_for_assignment(cfg, state.gains, make_assignment(cfg, joint));
    double objective = 0.0;
    for (double r : rates.v2n) objective += r;
    for (int n : active)
      for (int i = 0; i < cfg.members_per_platoon; ++i)
        if (state.payload.remaining_bits[n][i] > 0.0) objective += rates.v2v[n][i];

    if (objective > best.objective) {
      best.objective = objective;
      best.joint_action = joint;
    }
  }
  best.candidates = total;
  return best;
}

std::vector<std::optional<Action>> random_step(const EpisodeState& state, Rng& rng) {
  const EnvConfig& cfg = state.cfg;
  std::vector<std::optional<Action>> joint(cfg.num_platoons, std::nullopt);
  for (int n = 0; n < cfg.num_platoons; ++n) {
    if (!state.payload.active[n]) continue;
    joint[n] = Action{rng.uniform_int(cfg.num_v2n), rng.uniform_int(cfg.power_level_count())};
  }
  return joint;
}

}  // namespace pcvx
