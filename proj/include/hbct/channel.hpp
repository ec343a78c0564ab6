#pragma once

#include <cstdint>
#include <vector>

#include "hbct/system_params.hpp"

namespace hbct {

/// Node geometry: K transmitters on the straight source->destination
/// segment, equally spaced, plus the per-link distances used by the
/// path-loss model.
struct Topology {
  std::vector<Vec2> node_positions;  // K transmitters, source first
  Vec2 destination;
  Vec2 pt_position;
  Vec2 pr_position;
  std::vector<double> hop_distance;  // SU_k -> next hop (destination for k=K)
  std::vector<double> pt_distance;   // PT -> SU_k
  std::vector<double> pr_distance;   // SU_k -> PR
};

/// Places transmitter k at source + (k-1)/K * (destination - source).
/// Every hop then has length |destination - source| / K.
Topology place_nodes(const SystemParams& params);

/// beta^2 * (d / d0)^(-alpha). Rejects d <= 0.
double path_loss_gain(double distance_m, double fading_power, const SystemParams& params);

/// Draws the 3K power gains for one block. Fading powers are i.i.d.
/// unit-mean exponentials (or exactly 1 when params.fading is off); the
/// same seed always reproduces the same realization bit for bit.
/// Draw order: h_1..h_K, g_1..g_K, f_1..f_K.
ChannelRealization sample_channels(const Topology& topology, const SystemParams& params,
                                   std::uint64_t seed);

}  // namespace hbct
