#include "hbct/channel.hpp"

#include <cmath>

#include "hbct/errors.hpp"
#include "hbct/rng.hpp"

namespace hbct {

Topology place_nodes(const SystemParams& params) {
  if (params.num_hops < 1) throw ValidationError("place_nodes: num_hops must be >= 1");
  const Vec2 src = params.source_position;
  const Vec2 dst = params.destination_position;
  const double span = distance(src, dst);
  if (!(span > 0.0)) {
    throw ValidationError("place_nodes: source and destination coincide");
  }

  const int k_hops = params.num_hops;
  Topology topo;
  topo.destination = dst;
  topo.pt_position = params.pt_position;
  topo.pr_position = params.pr_position;
  topo.node_positions.resize(static_cast<size_t>(k_hops));
  topo.hop_distance.resize(static_cast<size_t>(k_hops));
  topo.pt_distance.resize(static_cast<size_t>(k_hops));
  topo.pr_distance.resize(static_cast<size_t>(k_hops));

  for (int k = 0; k < k_hops; ++k) {
    const double frac = static_cast<double>(k) / k_hops;
    Vec2 pos{src.x + frac * (dst.x - src.x), src.y + frac * (dst.y - src.y)};
    topo.node_positions[static_cast<size_t>(k)] = pos;
  }
  for (int k = 0; k < k_hops; ++k) {
    const Vec2 pos = topo.node_positions[static_cast<size_t>(k)];
    const Vec2 next = (k + 1 < k_hops) ? topo.node_positions[static_cast<size_t>(k + 1)] : dst;
    topo.hop_distance[static_cast<size_t>(k)] = distance(pos, next);
    topo.pt_distance[static_cast<size_t>(k)] = distance(params.pt_position, pos);
    topo.pr_distance[static_cast<size_t>(k)] = distance(pos, params.pr_position);
  }
  return topo;
}

double path_loss_gain(double distance_m, double fading_power, const SystemParams& params) {
  if (!(distance_m > 0.0)) {
    throw ValidationError("path_loss_gain: distance must be positive");
  }
  if (!(fading_power >= 0.0)) {
    throw ValidationError("path_loss_gain: fading power must be non-negative");
  }
  return fading_power *
         std::pow(distance_m / params.reference_distance, -params.path_loss_exponent);
}

ChannelRealization sample_channels(const Topology& topology, const SystemParams& params,
                                   std::uint64_t seed) {
  const size_t k_hops = topology.node_positions.size();
  if (k_hops == 0 || topology.hop_distance.size() != k_hops ||
      topology.pt_distance.size() != k_hops || topology.pr_distance.size() != k_hops) {
    throw ValidationError("sample_channels: malformed topology");
  }

  SplitMix64 rng(seed);
  auto fading_power = [&]() { return params.fading ? rng.exponential() : 1.0; };

  ChannelRealization ch;
  ch.pt_gain.resize(k_hops);
  ch.hop_gain.resize(k_hops);
  ch.pr_gain.resize(k_hops);
  ch.data_snr.resize(k_hops);
  for (size_t k = 0; k < k_hops; ++k) {
    ch.pt_gain[k] = path_loss_gain(topology.pt_distance[k], fading_power(), params);
  }
  for (size_t k = 0; k < k_hops; ++k) {
    ch.hop_gain[k] = path_loss_gain(topology.hop_distance[k], fading_power(), params);
  }
  for (size_t k = 0; k < k_hops; ++k) {
    ch.pr_gain[k] = path_loss_gain(topology.pr_distance[k], fading_power(), params);
  }
  for (size_t k = 0; k < k_hops; ++k) {
    ch.data_snr[k] = ch.hop_gain[k] / params.noise_power;
  }
  return ch;
}

}  // namespace hbct
