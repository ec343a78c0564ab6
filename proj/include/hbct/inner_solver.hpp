#pragma once

#include <vector>

#include "hbct/system_params.hpp"

namespace hbct {

// Closed-form per-block allocation for a given multiplier vector: the KKT
// root solve for A_k, the clipped power rule, conventional rates, the
// per-node mode rule, and the slot-length formulas that equalize per-link
// bits and exhaust the block.

/// Solves, sequentially for k = 1..K, the scalar KKT equation
///   x ln x - x (B_k + 1) + 1 - D_k = 0
/// with B_k = (zeta Pt / lambda_k) * sum_{i<k} lambda_i gamma_i h_i / A_i
/// and D_k = zeta Pt gamma_k h_k, on the bracket [e^{B_k}, inf).
/// A_k may be +inf when B_k is so large that the root exceeds double
/// range; downstream the power rule then falls back to the interference
/// cap. Requires every lambda_k > 0.
std::vector<double> solve_A(const DualWeights& lambda, const ChannelRealization& ch,
                            const SystemParams& params);

/// p_k = min{(A_k - 1) / gamma_k, I_p / f_k}.
std::vector<double> power_allocation(const std::vector<double>& a_values,
                                     const ChannelRealization& ch,
                                     const SystemParams& params);

/// Omega = W log2(1 + p * gamma), bits per second.
double conventional_rate(double power, double snr_coeff, double bandwidth_hz);

/// Per-node binary mode choice. Node 1 backscatters iff
///   Omega_1 < B_1^b (1 + p_1 / (zeta Pt h_1));
/// nodes k >= 2 backscatter iff Omega_k < B_k^b. Ties resolve to
/// conventional (the objective is flat at equality).
std::vector<int> mode_select(const std::vector<double>& conventional_rates_bps,
                             double source_power, const ChannelRealization& ch,
                             const SystemParams& params);

struct TimeAllocation {
  double tau0 = 0.0;
  std::vector<double> tau;
  std::vector<double> slot_rate_bps;  // X_k = B_k^b when backscattering, else Omega_k
};

/// Slot lengths that equalize tau_k X_k across nodes and spend the whole
/// block, with tau0 sized so the source spends exactly what it harvests.
/// Throws NumericalError("dead hop ...") if any X_k is zero.
TimeAllocation time_allocation(const std::vector<int>& mode,
                               const std::vector<double>& conventional_rates_bps,
                               double source_power, const ChannelRealization& ch,
                               const SystemParams& params);

/// Full inner pipeline for one multiplier vector. On channels where the
/// KKT-root power of some node k >= 2 would exceed what that node can
/// harvest before its slot (no multiplier choice avoids it when the
/// harvest link is much weaker than the data link), the power is capped at
/// the affordable rate and rates/modes/slots are recomputed to a fixed
/// point; affordable allocations pass through unchanged. Results that
/// still violate the consumed-power budget are flagged infeasible (with
/// cpc_violation set) and treated as worthless by the outer search.
Allocation hbct_inner(const DualWeights& lambda, const ChannelRealization& ch,
                      const SystemParams& params);

/// Signed residuals of the KKT root equation at the given A values,
/// normalized per unit of A (the root grows like e^{B+1}, so the raw
/// residual's floating-point noise floor scales with A; dividing by A
/// keeps a correct root's residual near machine epsilon at every scale).
/// Infinite entries are skipped and report 0. Used by the selftest battery.
std::vector<double> kkt_residuals(const std::vector<double>& a_values,
                                  const DualWeights& lambda, const ChannelRealization& ch,
                                  const SystemParams& params);

}  // namespace hbct
