#include "pcvx/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "pcvx/units.hpp"

namespace pcvx {

double v2n_pathloss(double distance_m, double min_distance_m) {
  if (distance_m <= 0.0) throw std::invalid_argument("v2n_pathloss: distance must be positive");
  const double d = std::max(distance_m, min_distance_m);
  return 128.1 + 37.6 * std::log10(d / 1000.0);
}

double v2v_pathloss(double distance_m, double carrier_ghz, double min_distance_m) {
  if (distance_m <= 0.0) throw std::invalid_argument("v2v_pathloss: distance must be positive");
  const double d = std::max(distance_m, min_distance_m);
  return 38.77 + 16.7 * std::log10(d) + 18.2 * std::log10(carrier_ghz);
}

double sample_shadowing(Rng& rng, double std_db) {
  if (std_db < 0.0) throw std::invalid_argument("sample_shadowing: std must be nonnegative");
  return rng.normal(0.0, std_db);
}

double sample_small_scale(Rng& rng) { return rng.exponential_unit_mean(); }

double combined_gain(const LargeScale& large, double small_scale) {
  return db_to_linear(-large.pathloss_db + large.shadowing_db) * small_scale;
}

double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

Topology drop_topology(int num_v2n, int num_platoons, int members_per_platoon,
                       const ChannelConfig& cfg, Rng& rng) {
  if (num_v2n < 1) throw std::invalid_argument("drop_topology: at least one sub-band required");
  if (num_platoons < 1) throw std::invalid_argument("drop_topology: at least one platoon required");
  if (members_per_platoon < 1) throw std::invalid_argument("drop_topology: platoon needs members");
  if (cfg.lane_count < 1) throw std::invalid_argument("drop_topology: lane grid is empty");

  // Antennas sit at vehicle midpoints, so adjacent antennas within a platoon
  // are one vehicle length plus one gap apart.
  const double pitch = cfg.vehicle_length_m + cfg.vehicle_gap_m;
  const double platoon_extent = members_per_platoon * pitch;
  const double half = cfg.road_length_m / 2.0;
  if (platoon_extent + cfg.vehicle_length_m > cfg.road_length_m)
    throw std::invalid_argument("drop_topology: platoon length exceeds lane length");

  Topology topo;
  topo.bs = Position{0.0, 0.0, -1};

  auto lane_y = [&](int lane) { return cfg.road_offset_m + lane * cfg.lane_width_m; };

  for (int m = 0; m < num_v2n; ++m) {
    const int lane = rng.uniform_int(cfg.lane_count);
    topo.v2n_users.push_back(Position{rng.uniform(-half, half), lane_y(lane), lane});
    topo.velocities_mps.push_back(kmh_to_mps(rng.uniform(cfg.speed_min_kmh, cfg.speed_max_kmh)));
  }

  for (int n = 0; n < num_platoons; ++n) {
    const int lane = rng.uniform_int(cfg.lane_count);
    // Keep the whole platoon on the road: the leader needs platoon_extent of
    // clearance behind it.
    const double leader_x = rng.uniform(-half + platoon_extent, half);
    PlatoonLayout platoon;
    platoon.leader = Position{leader_x, lane_y(lane), lane};
    platoon.velocity_mps = kmh_to_mps(rng.uniform(cfg.speed_min_kmh, cfg.speed_max_kmh));
    for (int i = 0; i < members_per_platoon; ++i)
      platoon.members.push_back(Position{leader_x - (i + 1) * pitch, lane_y(lane), lane});
    for (int i = 0; i <= members_per_platoon; ++i)
      topo.velocities_mps.push_back(platoon.velocity_mps);
    topo.platoons.push_back(std::move(platoon));
  }
  return topo;
}

}  // namespace pcvx
