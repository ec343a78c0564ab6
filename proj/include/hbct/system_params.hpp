#pragma once

#include <cmath>
#include <vector>

#include "hbct/errors.hpp"

namespace hbct {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Scenario constants for a K-hop secondary network sharing a primary
/// transmitter/receiver pair. All powers are linear and normalized to the
/// noise power; decibels exist only at the CLI boundary.
struct SystemParams {
  int num_hops = 3;                          // K transmitting nodes
  double block_duration = 1.0;               // T, seconds
  double pt_power = 1e4;                     // primary transmit power (linear)
  double interference_threshold = 1.0;       // IPC cap at the primary receiver
  double harvest_efficiency = 0.8;           // zeta, in [0,1]
  double noise_power = 1.0;                  // sigma^2 (linear)
  double bandwidth_hz = 1e6;                 // W
  std::vector<double> backscatter_rates_bps{3.8e6, 3.8e6, 3.8e6};  // per hop
  Vec2 pt_position{-8.0, 10.0};
  Vec2 pr_position{-2.0, 10.0};
  Vec2 source_position{-10.0, 0.0};
  Vec2 destination_position{0.0, 0.0};
  double path_loss_exponent = 2.0;           // alpha
  double reference_distance = 1.0;           // d0, meters
  bool fading = true;                        // unit-mean Rayleigh power fading
};

/// 10^(db/10). Rejects non-finite input.
double db_to_linear(double value_db);
double linear_to_db(double value_linear);

/// Returns the params unchanged when every invariant holds; otherwise throws
/// ValidationError listing each violated field.
SystemParams validate_params(SystemParams params);

/// One draw of the channel power gains, plus the derived data-SNR
/// coefficients gamma_k = g_k / sigma^2.
struct ChannelRealization {
  std::vector<double> pt_gain;   // h_k, PT -> SU_k
  std::vector<double> hop_gain;  // g_k, SU_k -> next hop
  std::vector<double> pr_gain;   // f_k, SU_k -> PR
  std::vector<double> data_snr;  // gamma_k
};

/// Non-negative multiplier vector for the per-link delivery constraints.
/// Always stored normalized to max = 1: the inner closed forms depend only
/// on multiplier ratios, so the scale direction is removed up front.
class DualWeights {
 public:
  explicit DualWeights(std::vector<double> raw);
  static DualWeights uniform(int num_hops);

  const std::vector<double>& values() const { return lambda_; }
  int size() const { return static_cast<int>(lambda_.size()); }
  double operator[](int k) const { return lambda_[static_cast<size_t>(k)]; }

 private:
  std::vector<double> lambda_;
};

/// A full decision for one block: harvest slot, per-node slots, modes,
/// powers, rates, and the resulting bit counts.
struct Allocation {
  double tau0 = 0.0;                           // harvest-only slot, seconds
  std::vector<double> tau;                     // per-node slot durations
  std::vector<int> mode;                       // c_k: 1 backscatter, 0 conventional
  std::vector<double> power;                   // p_k (linear)
  std::vector<double> energy;                  // e_k = p_k (1-c_k) tau_k
  std::vector<double> conventional_rate_bps;   // Omega_k
  std::vector<double> slot_rate_bps;           // X_k
  std::vector<double> per_link_bits;           // R_k
  double delivery_bits = 0.0;                  // min_k R_k
  bool feasible = false;
  double cpc_violation = 0.0;  // worst relative consumed-power violation; 0 when feasible
};

}  // namespace hbct
