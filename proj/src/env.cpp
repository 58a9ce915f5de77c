#include "pcvx/env.hpp"

#include <cmath>
#include <stdexcept>

namespace pcvx {

void EnvConfig::validate() const {
  if (num_v2n < 1) throw std::invalid_argument("config: at least one sub-band required");
  if (num_platoons < 1) throw std::invalid_argument("config: at least one platoon required");
  if (members_per_platoon < 1) throw std::invalid_argument("config: members_per_platoon must be >= 1");
  if (bandwidth_hz <= 0.0) throw std::invalid_argument("config: bandwidth must be positive");
  if (power_levels_dbm.empty()) throw std::invalid_argument("config: empty power level list");
  if (latency_ms <= 0.0 || step_ms <= 0.0)
    throw std::invalid_argument("config: latency and step length must be positive");
  const double steps = latency_ms / step_ms;
  if (std::abs(steps - std::round(steps)) > 1e-9)
    throw std::invalid_argument("config: latency must be a whole number of steps");
  if (payload_bits < 0.0) throw std::invalid_argument("config: negative payload");
}

bool PayloadState::any_active() const {
  for (bool a : active)
    if (a) return true;
  return false;
}

int PayloadState::delivered_links() const {
  int count = 0;
  for (const auto& row : remaining_bits)
    for (double bits : row)
      if (bits <= 0.0) ++count;
  return count;
}

int PayloadState::total_links() const {
  return static_cast<int>(remaining_bits.size()) *
         (remaining_bits.empty() ? 0 : static_cast<int>(remaining_bits.front().size()));
}

double compute_v2n_sinr(const EnvConfig& cfg, const LinkGains& gains,
                        const Assignment& assignment, int m) {
  const double signal = dbm_to_mw(cfg.v2n_power_dbm) * gains.cc_gain(m);
  double interference = 0.0;
  for (int n = 0; n < cfg.num_platoons; ++n)
    if (assignment.transmits_on(n, m))
      interference += assignment.power_mw[n] * gains.dc_gain(n, m);
  return signal / (interference + cfg.bs_noise_mw());
}

double compute_v2v_sinr(const EnvConfig& cfg, const LinkGains& gains,
                        const Assignment& assignment, int n, int i) {
  const int m = assignment.sub_band[n];
  if (m < 0) throw std::logic_error("compute_v2v_sinr: platoon is not transmitting");
  const int v = cfg.members_per_platoon;
  const double signal = assignment.power_mw[n] * gains.dd_gain(n, n, i, v);
  // The sub-band's own V2N uplink always interferes; other platoons only
  // when they reuse the same sub-band.
  double interference = dbm_to_mw(cfg.v2n_power_dbm) * gains.cd_gain(m, n, i, v);
  for (int l = 0; l < cfg.num_platoons; ++l)
    if (l != n && assignment.transmits_on(l, m))
      interference += assignment.power_mw[l] * gains.dd_gain(l, n, i, v);
  return signal / (interference + cfg.vehicle_noise_mw());
}

double achievable_rate(double sinr, double bandwidth_hz) {
  return bandwidth_hz * std::log2(1.0 + sinr);
}

RateSet rates_for_assignment(const EnvConfig& cfg, const LinkGains& gains,
                             const Assignment& assignment) {
  RateSet rates;
  rates.v2n.resize(cfg.num_v2n);
  for (int m = 0; m < cfg.num_v2n; ++m)
    rates.v2n[m] = achievable_rate(compute_v2n_sinr(cfg, gains, assignment, m), cfg.bandwidth_hz);
  rates.v2v.assign(cfg.num_platoons, std::vector<double>(cfg.members_per_platoon, 0.0));
  for (int n = 0; n < cfg.num_platoons; ++n) {
    if (assignment.sub_band[n] < 0) continue;
    for (int i = 0; i < cfg.members_per_platoon; ++i)
      rates.v2v[n][i] =
          achievable_rate(compute_v2v_sinr(cfg, gains, assignment, n, i), cfg.bandwidth_hz);
  }
  return rates;
}

Assignment make_assignment(const EnvConfig& cfg,
                           const std::vector<std::optional<Action>>& joint_action) {
  if (static_cast<int>(joint_action.size()) != cfg.num_platoons)
    throw std::invalid_argument("make_assignment: one entry per platoon expected");
  Assignment assignment;
  assignment.sub_band.assign(cfg.num_platoons, -1);
  assignment.power_dbm.assign(cfg.num_platoons, 0.0);
  assignment.power_mw.assign(cfg.num_platoons, 0.0);
  for (int n = 0; n < cfg.num_platoons; ++n) {
    if (!joint_action[n]) continue;
    const Action& a = *joint_action[n];
    if (a.sub_band < 0 || a.sub_band >= cfg.num_v2n)
      throw std::out_of_range("make_assignment: sub-band index out of range");
    if (a.power_level < 0 || a.power_level >= cfg.power_level_count())
      throw std::out_of_range("make_assignment: power level index out of range");
    assignment.sub_band[n] = a.sub_band;
    assignment.power_dbm[n] = cfg.power_levels_dbm[a.power_level];
    assignment.power_mw[n] = dbm_to_mw(assignment.power_dbm[n]);
  }
  return assignment;
}

Assignment assignment_from_dbm(std::vector<int> sub_band, std::vector<double> power_dbm) {
  if (sub_band.size() != power_dbm.size())
    throw std::invalid_argument("assignment_from_dbm: size mismatch");
  Assignment assignment;
  assignment.power_mw.reserve(power_dbm.size());
  for (double p : power_dbm) assignment.power_mw.push_back(dbm_to_mw(p));
  assignment.sub_band = std::move(sub_band);
  assignment.power_dbm = std::move(power_dbm);
  return assignment;
}

namespace {

SmallScaleSet sample_small_set(const EnvConfig& cfg, Rng& rng) {
  const int m_count = cfg.num_v2n;
  const int n_count = cfg.num_platoons;
  const int receivers = n_count * cfg.members_per_platoon;
  SmallScaleSet s;
  s.cc.resize(m_count);
  for (auto& g : s.cc) g = sample_small_scale(rng);
  s.dc.assign(n_count, std::vector<double>(m_count));
  for (auto& row : s.dc)
    for (auto& g : row) g = sample_small_scale(rng);
  s.dd.assign(n_count, std::vector<double>(receivers));
  for (auto& row : s.dd)
    for (auto& g : row) g = sample_small_scale(rng);
  s.cd.assign(m_count, std::vector<double>(receivers));
  for (auto& row : s.cd)
    for (auto& g : row) g = sample_small_scale(rng);
  return s;
}

LargeScale sample_v2n_large(double dist, const ChannelConfig& ch, Rng& rng) {
  return LargeScale{v2n_pathloss(dist, ch.v2n_min_distance_m),
                    sample_shadowing(rng, ch.v2n_shadow_std_db)};
}

LargeScale sample_v2v_large(double dist, const ChannelConfig& ch, Rng& rng) {
  return LargeScale{v2v_pathloss(dist, ch.carrier_ghz, ch.v2v_min_distance_m),
                    sample_shadowing(rng, ch.v2v_shadow_std_db)};
}

LinkGains sample_large_scale(const EnvConfig& cfg, const Topology& topo, Rng& rng) {
  const ChannelConfig& ch = cfg.channel;
  const int v = cfg.members_per_platoon;
  LinkGains gains;
  gains.cc.resize(cfg.num_v2n);
  for (int m = 0; m < cfg.num_v2n; ++m)
    gains.cc[m] = sample_v2n_large(distance(topo.v2n_users[m], topo.bs), ch, rng);
  gains.dc.resize(cfg.num_platoons);
  for (int n = 0; n < cfg.num_platoons; ++n)
    gains.dc[n] = sample_v2n_large(distance(topo.platoons[n].leader, topo.bs), ch, rng);
  gains.dd.assign(cfg.num_platoons, std::vector<LargeScale>(cfg.num_platoons * v));
  for (int l = 0; l < cfg.num_platoons; ++l)
    for (int n = 0; n < cfg.num_platoons; ++n)
      for (int i = 0; i < v; ++i)
        gains.dd[l][n * v + i] = sample_v2v_large(
            distance(topo.platoons[l].leader, topo.platoons[n].members[i]), ch, rng);
  gains.cd.assign(cfg.num_v2n, std::vector<LargeScale>(cfg.num_platoons * v));
  for (int m = 0; m < cfg.num_v2n; ++m)
    for (int n = 0; n < cfg.num_platoons; ++n)
      for (int i = 0; i < v; ++i)
        gains.cd[m][n * v + i] = sample_v2v_large(
            distance(topo.v2n_users[m], topo.platoons[n].members[i]), ch, rng);
  return gains;
}

}  // namespace

EpisodeState reset_episode(const EnvConfig& cfg, Rng& rng) {
  cfg.validate();
  EpisodeState state;
  state.cfg = cfg;
  state.topo = drop_topology(cfg.num_v2n, cfg.num_platoons, cfg.members_per_platoon,
                             cfg.channel, rng);
  state.gains = sample_large_scale(cfg, state.topo, rng);
  // Pre-episode measurement slot: the first observations need channel
  // readings even though no V2V transmission happened yet.
  state.last_small = sample_small_set(cfg, rng);
  state.gains.small = sample_small_set(cfg, rng);
  state.last_assignment.reset();
  state.payload.remaining_bits.assign(
      cfg.num_platoons, std::vector<double>(cfg.members_per_platoon, cfg.payload_bits));
  state.payload.steps_elapsed = 0;
  state.payload.active.assign(cfg.num_platoons, cfg.payload_bits > 0.0);
  state.done = !state.payload.any_active();
  state.rng = rng.fork();
  return state;
}

StepOutcome step(EpisodeState& state, const std::vector<std::optional<Action>>& joint_action) {
  if (state.done) throw std::logic_error("step: episode already finished");
  const EnvConfig& cfg = state.cfg;
  if (static_cast<int>(joint_action.size()) != cfg.num_platoons)
    throw std::invalid_argument("step: one action slot per platoon expected");
  for (int n = 0; n < cfg.num_platoons; ++n) {
    if (state.payload.active[n] && !joint_action[n])
      throw std::invalid_argument("step: active platoon is missing an action");
    if (!state.payload.active[n] && joint_action[n])
      throw std::invalid_argument("step: finished platoon cannot act");
  }

  const Assignment assignment = make_assignment(cfg, joint_action);
  const RateSet rates = rates_for_assignment(cfg, state.gains, assignment);

  const double step_s = cfg.step_ms * 1e-3;
  for (int n = 0; n < cfg.num_platoons; ++n) {
    if (!state.payload.active[n]) continue;
    bool all_served = true;
    for (int i = 0; i < cfg.members_per_platoon; ++i) {
      double& remaining = state.payload.remaining_bits[n][i];
      remaining = std::max(0.0, remaining - rates.v2v[n][i] * step_s);
      if (remaining > 0.0) all_served = false;
    }
    if (all_served) state.payload.active[n] = false;
  }
  state.payload.steps_elapsed += 1;
  state.done = state.payload.steps_elapsed >= cfg.steps_per_episode() ||
               !state.payload.any_active();

  state.last_assignment = assignment;
  state.last_small = state.gains.small;
  state.gains.small = sample_small_set(cfg, state.rng);

  StepOutcome outcome;
  outcome.v2n_rates = rates.v2n;
  outcome.v2v_rates = rates.v2v;
  outcome.payload = state.payload;
  outcome.done = state.done;
  return outcome;
}

std::vector<std::vector<double>> v2n_tail_rates(EpisodeState& state) {
  const EnvConfig& cfg = state.cfg;
  const Assignment silent = make_assignment(
      cfg, std::vector<std::optional<Action>>(cfg.num_platoons, std::nullopt));
  std::vector<std::vector<double>> tail;
  while (state.payload.steps_elapsed < cfg.steps_per_episode()) {
    tail.push_back(rates_for_assignment(cfg, state.gains, silent).v2n);
    state.payload.steps_elapsed += 1;
    state.last_small = state.gains.small;
    state.gains.small = sample_small_set(cfg, state.rng);
  }
  state.done = true;
  return tail;
}

std::vector<std::vector<bool>> delivery_success(const PayloadState& payload) {
  std::vector<std::vector<bool>> success(payload.remaining_bits.size());
  for (std::size_t n = 0; n < payload.remaining_bits.size(); ++n) {
    success[n].resize(payload.remaining_bits[n].size());
    for (std::size_t i = 0; i < payload.remaining_bits[n].size(); ++i)
      success[n][i] = payload.remaining_bits[n][i] <= 0.0;
  }
  return success;
}

}  // namespace pcvx
