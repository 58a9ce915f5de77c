// Episode environment: holds one drop's gains and payload counters,
// computes SINRs and Shannon rates for every link under a joint
// sub-band/power assignment, and advances time in coherence-length steps.
#pragma once

#include <optional>
#include <vector>

#include "pcvx/action.hpp"
#include "pcvx/channel.hpp"
#include "pcvx/rng.hpp"
#include "pcvx/units.hpp"

namespace pcvx {

struct EnvConfig {
  int num_v2n = 1;              // M: V2N links, one per sub-band
  int num_platoons = 4;         // N
  int members_per_platoon = 3;  // |V_n| receivers per platoon

  double bandwidth_hz = 1e6;      // W, per sub-band
  double v2n_power_dbm = 23.0;    // P_c, constant
  std::vector<double> power_levels_dbm = {23.0, 10.0, 5.0, -100.0};  // A_p
  double bs_noise_figure_db = 5.0;
  double vehicle_noise_dbm = -114.0;  // sigma_d^2

  double latency_ms = 10.0;  // T
  double step_ms = 1.0;      // Delta_T, coherence time
  double payload_bits = 8.0 * 1060.0 * 8.0;  // B per V2V link

  ChannelConfig channel;

  // sigma_c^2 at the BS, derived from the thermal floor and noise figure.
  double bs_noise_dbm() const { return thermal_noise_dbm(bandwidth_hz, bs_noise_figure_db); }
  double bs_noise_mw() const { return dbm_to_mw(bs_noise_dbm()); }
  double vehicle_noise_mw() const { return dbm_to_mw(vehicle_noise_dbm); }
  int steps_per_episode() const { return static_cast<int>(latency_ms / step_ms + 0.5); }
  int power_level_count() const { return static_cast<int>(power_levels_dbm.size()); }

  void validate() const;  // throws std::invalid_argument on malformed configs
};

// Small-scale power gains for one time step. Receiver members are flattened
// as n * members_per_platoon + i throughout.
struct SmallScaleSet {
  std::vector<double> cc;               // [M]
  std::vector<std::vector<double>> dc;  // [N][M], per candidate sub-band
  std::vector<std::vector<double>> dd;  // [N transmitters][N*V receivers]
  std::vector<std::vector<double>> cd;  // [M][N*V]
};

// Large-scale tables (episode-constant) plus the current step's small-scale.
struct LinkGains {
  std::vector<LargeScale> cc;               // [M]
  std::vector<LargeScale> dc;               // [N], leader -> BS
  std::vector<std::vector<LargeScale>> dd;  // [N][N*V]
  std::vector<std::vector<LargeScale>> cd;  // [M][N*V]
  SmallScaleSet small;

  double cc_gain(int m) const { return combined_gain(cc[m], small.cc[m]); }
  double dc_gain(int n, int m) const { return combined_gain(dc[n], small.dc[n][m]); }
  double dd_gain(int from, int to_platoon, int member, int v) const {
    return combined_gain(dd[from][to_platoon * v + member], small.dd[from][to_platoon * v + member]);
  }
  double cd_gain(int m, int to_platoon, int member, int v) const {
    return combined_gain(cd[m][to_platoon * v + member], small.cd[m][to_platoon * v + member]);
  }
};

// Realized transmissions of one step. sub_band[n] == -1 means platoon n is
// silent (already delivered); active rows occupy exactly one sub-band.
struct Assignment {
  std::vector<int> sub_band;      // [N]
  std::vector<double> power_dbm;  // [N], meaningful where sub_band >= 0
  std::vector<double> power_mw;   // cached linear form of power_dbm

  bool transmits_on(int n, int m) const { return sub_band[n] == m; }
};

struct PayloadState {
  std::vector<std::vector<double>> remaining_bits;  // [N][V], never increases
  int steps_elapsed = 0;
  std::vector<bool> active;  // false once every member of the platoon is served

  bool any_active() const;
  int delivered_links() const;
  int total_links() const;
};

struct StepOutcome {
  std::vector<double> v2n_rates;              // [M] bits/s
  std::vector<std::vector<double>> v2v_rates; // [N][V] bits/s, 0 for silent platoons
  PayloadState payload;                       // post-step
  bool done = false;
};

// One episode's mutable state. Fields are public: the trainer reads gains
// for observations and the baselines need the global snapshot.
struct EpisodeState {
  EnvConfig cfg;
  Topology topo;
  LinkGains gains;            // gains the next step() call will use
  SmallScaleSet last_small;   // gains measured during the previous step
  std::optional<Assignment> last_assignment;  // realized in the previous step
  PayloadState payload;
  bool done = false;
  Rng rng{0};  // drives per-step small-scale redraws

  int steps_remaining() const { return cfg.steps_per_episode() - payload.steps_elapsed; }
};

// Eq.-1 style uplink SINR of V2N link m under the given assignment.
// Linear mW throughout; silent platoons contribute no interference.
double compute_v2n_sinr(const EnvConfig& cfg, const LinkGains& gains,
                        const Assignment& assignment, int m);

// SINR at member i of platoon n; only co-channel transmitters and the
// sub-band's own V2N user interfere.
double compute_v2v_sinr(const EnvConfig& cfg, const LinkGains& gains,
                        const Assignment& assignment, int n, int i);

// Shannon rate W*log2(1+sinr), bits/s.
double achievable_rate(double sinr, double bandwidth_hz);

struct RateSet {
  std::vector<double> v2n;               // [M]
  std::vector<std::vector<double>> v2v;  // [N][V]
};

// Pure rate evaluation used by step(), the baselines and the metrics bound.
RateSet rates_for_assignment(const EnvConfig& cfg, const LinkGains& gains,
                             const Assignment& assignment);

// Builds an Assignment from per-platoon actions; silent platoons pass nullopt.
Assignment make_assignment(const EnvConfig& cfg,
                           const std::vector<std::optional<Action>>& joint_action);

// Direct construction from explicit dBm values (sub_band -1 = silent).
Assignment assignment_from_dbm(std::vector<int> sub_band, std::vector<double> power_dbm);

// Fresh drop: new topology, new frozen large-scale fading, payload reset to B
// for every link. Also draws the pre-episode channel measurement that the
// first observations are built from.
EpisodeState reset_episode(const EnvConfig& cfg, Rng& rng);

// Advances one coherence step under the joint action (one entry per platoon,
// nullopt for inactive ones). Decrements payloads by rate * Delta_T, redraws
// small-scale fading, updates the active/done flags.
// Throws std::logic_error when called on a finished episode.
StepOutcome step(EpisodeState& state, const std::vector<std::optional<Action>>& joint_action);

// After the V2V phase finished early, plays out the remaining V2N-only steps
// of the latency window and returns their per-step rate vectors. Used by the
// evaluation harness so V2N averages always cover the full window.
std::vector<std::vector<double>> v2n_tail_rates(EpisodeState& state);

// Per-link success flags; true iff the link's payload fully drained in time.
std::vector<std::vector<bool>> delivery_success(const PayloadState& payload);

}  // namespace pcvx
