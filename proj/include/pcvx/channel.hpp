// Urban single-cell channel model: episode topology drops and the
// large-scale (path loss + log-normal shadowing) and small-scale
// (Rayleigh, unit-mean exponential power) fading of every link class.
//
// Link classes follow the usual underlay naming:
//   cc  V2N user -> base station          (wanted V2N signal)
//   dc  platoon leader -> base station    (interference to the BS)
//   dd  platoon leader -> platoon member  (wanted V2V signal, or
//                                          cross-platoon interference)
//   cd  V2N user -> platoon member        (interference to V2V receivers)
#pragma once

#include <vector>

#include "pcvx/rng.hpp"

namespace pcvx {

struct Position {
  double x = 0.0;  // meters
  double y = 0.0;  // meters
  int lane_id = -1;
};

struct PlatoonLayout {
  Position leader;
  std::vector<Position> members;  // ordered behind the leader
  double velocity_mps = 0.0;
};

struct Topology {
  Position bs;
  std::vector<Position> v2n_users;      // length M
  std::vector<PlatoonLayout> platoons;  // length N
  std::vector<double> velocities_mps;   // every vehicle: V2N users, then platoons
};

// Propagation constants and drop geometry. The road is a straight multi-lane
// segment along the x axis; the BS sits at the origin, offset from the first
// lane. Vehicles are redropped each episode and large-scale fading is frozen
// for the episode, so within-episode motion is not modeled.
struct ChannelConfig {
  double carrier_ghz = 2.0;

  double v2n_shadow_std_db = 8.0;
  double v2v_shadow_std_db = 3.0;
  double v2n_min_distance_m = 10.0;  // clamp below this before the log model
  double v2v_min_distance_m = 3.0;

  double road_length_m = 2000.0;
  int lane_count = 4;
  double lane_width_m = 4.0;
  double road_offset_m = 35.0;  // BS to first lane center

  double vehicle_length_m = 4.0;
  double vehicle_gap_m = 1.0;  // bumper-to-bumper spacing inside a platoon

  double speed_min_kmh = 36.0;
  double speed_max_kmh = 54.0;
};

// Per-link large-scale fading, fixed for one episode.
struct LargeScale {
  double pathloss_db = 0.0;   // >= 0
  double shadowing_db = 0.0;  // signed
};

// Urban-macro uplink curve, 128.1 + 37.6 log10(d/km), clamped at min_distance.
double v2n_pathloss(double distance_m, double min_distance_m = 10.0);

// Urban LOS vehicle-to-vehicle curve, 38.77 + 16.7 log10(d) + 18.2 log10(f).
double v2v_pathloss(double distance_m, double carrier_ghz = 2.0,
                    double min_distance_m = 3.0);

// Zero-mean log-normal shadowing, in dB.
double sample_shadowing(Rng& rng, double std_db);

// Rayleigh-fading power gain, Exp(1); redrawn every time step.
double sample_small_scale(Rng& rng);

// Linear power gain 10^((-pathloss + shadowing)/10) * small_scale.
double combined_gain(const LargeScale& large, double small_scale);

double distance(const Position& a, const Position& b);

// Uniformly drops M V2N users and N platoons on the lane grid.
// Deterministic given the rng state. Throws std::invalid_argument on
// configs with no sub-band or with platoons longer than the road.
Topology drop_topology(int num_v2n, int num_platoons, int members_per_platoon,
                       const ChannelConfig& cfg, Rng& rng);

}  // namespace pcvx
