#pragma once

#include <cstdint>

#include "hbct/system_params.hpp"

namespace hbct {

// Brute-force verification tools. Exponential in K by design; the grid
// search is a certified lower bound on the true optimum and converges to
// it as the resolution grows.

struct GridSpec {
  int time_resolution = 64;   // lattice points per unit of the time simplex
  int power_resolution = 64;  // accepted for symmetry; powers are exact per
                              // cell (the objective is increasing in p_k, so
                              // the largest feasible power is optimal)
};

enum class OracleModes {
  kHybrid,            // enumerate c in {0,1}^K
  kConventionalOnly,  // restrict to c = 0 (baseline comparison)
};

struct OracleResult {
  double delivery_bits = 0.0;
  Allocation best;  // argmax cell; per-link bits are generally unequal here
};

/// Enumerates binary mode patterns and a barycentric lattice over
/// (tau0, tau_1..tau_K) summing to T; per cell the power is the largest
/// value meeting both the interference and consumed-power constraints.
/// Limited to K <= 3.
OracleResult brute_force_primal(const ChannelRealization& ch, const SystemParams& params,
                                const GridSpec& grid, OracleModes modes = OracleModes::kHybrid);

struct ConcavityReport {
  int trials = 0;
  int violations = 0;        // midpoint below the chord by more than 1e-9
  double min_margin = 0.0;   // min over pairs of R(mid) - (R(x)+R(y))/2
  double max_margin = 0.0;   // max over pairs (strictly positive somewhere
                             // unless the objective is affine on the sample)
};

/// Samples random feasible (tau, phi, e) pairs and checks midpoint
/// concavity of the min-over-links bit count.
ConcavityReport concavity_check(const ChannelRealization& ch, const SystemParams& params,
                                int trials, std::uint64_t seed);

}  // namespace hbct
