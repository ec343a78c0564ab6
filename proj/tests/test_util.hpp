#pragma once

// Shared helpers for the test suites: the default simulation scenario,
// hand-built channels, and the independent numerical oracles (long-double
// bisection and Lambert W) that cross-check the solver's root finder.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "hbct/channel.hpp"
#include "hbct/system_params.hpp"

namespace testutil {

inline hbct::SystemParams default_scenario() {
  return hbct::validate_params(hbct::SystemParams{});
}

inline hbct::SystemParams without_fading(hbct::SystemParams params) {
  params.fading = false;
  return params;
}

/// Channel with every gain pinned by hand; geometry is bypassed entirely.
inline hbct::ChannelRealization manual_channel(std::vector<double> pt_gain,
                                               std::vector<double> hop_gain,
                                               std::vector<double> pr_gain,
                                               double noise_power = 1.0) {
  hbct::ChannelRealization ch;
  ch.pt_gain = std::move(pt_gain);
  ch.hop_gain = std::move(hop_gain);
  ch.pr_gain = std::move(pr_gain);
  ch.data_snr.resize(ch.hop_gain.size());
  for (size_t k = 0; k < ch.hop_gain.size(); ++k) ch.data_snr[k] = ch.hop_gain[k] / noise_power;
  return ch;
}

/// Plain long-double bisection; the independent root oracle for the KKT
/// equation tests. Assumes f(lo) <= 0 <= f(hi).
inline long double bisect(const std::function<long double(long double)>& f, long double lo,
                          long double hi, int iterations = 200) {
  for (int i = 0; i < iterations; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (f(mid) < 0.0L) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5L * (lo + hi);
}

/// Principal Lambert W branch for z >= 0 (Halley iteration).
inline long double lambert_w0(long double z) {
  if (z == 0.0L) return 0.0L;
  long double w = std::log(1.0L + z);
  for (int i = 0; i < 100; ++i) {
    const long double ew = std::exp(w);
    const long double f = w * ew - z;
    const long double denom = ew * (w + 1.0L) - (w + 2.0L) * f / (2.0L * w + 2.0L);
    const long double step = f / denom;
    w -= step;
    if (std::fabs(step) <= 1e-18L * std::max(1.0L, std::fabs(w))) break;
  }
  return w;
}

struct KktTerms {
  std::vector<long double> coupling;  // B_k
  std::vector<long double> gain;      // D_k
};

/// Recomputes the per-hop KKT coefficients from first principles for
/// residual checks (extended precision; the leading terms cancel near the
/// root).
inline KktTerms kkt_terms(const std::vector<double>& a_values,
                          const std::vector<double>& lambda,
                          const hbct::ChannelRealization& ch, const hbct::SystemParams& params) {
  KktTerms terms;
  const long double zeta_pt =
      static_cast<long double>(params.harvest_efficiency) * params.pt_power;
  long double coupling_sum = 0.0L;
  for (size_t k = 0; k < a_values.size(); ++k) {
    terms.coupling.push_back(zeta_pt / lambda[k] * coupling_sum);
    terms.gain.push_back(zeta_pt * ch.data_snr[k] * ch.pt_gain[k]);
    if (std::isfinite(a_values[k])) {
      coupling_sum += static_cast<long double>(lambda[k]) * ch.data_snr[k] * ch.pt_gain[k] /
                      a_values[k];
    }
  }
  return terms;
}

/// |x ln x - x (B+1) + 1 - D| / x at each finite root. The residual is
/// measured per unit of x: the root grows like e^{B+1}, so the raw
/// residual's floating-point noise floor grows with it, while the
/// normalized residual stays near machine epsilon for a correct root.
inline std::vector<double> kkt_residuals_oracle(const std::vector<double>& a_values,
                                                const std::vector<double>& lambda,
                                                const hbct::ChannelRealization& ch,
                                                const hbct::SystemParams& params) {
  const KktTerms terms = kkt_terms(a_values, lambda, ch, params);
  std::vector<double> residuals(a_values.size(), 0.0);
  for (size_t k = 0; k < a_values.size(); ++k) {
    if (!std::isfinite(a_values[k])) continue;
    const long double x = a_values[k];
    residuals[k] = static_cast<double>(std::fabs(
        x * std::log(x) - x * (terms.coupling[k] + 1.0L) + 1.0L - terms.gain[k]) / x);
  }
  return residuals;
}

/// Largest slot rate appearing in either allocation; scales the grid
/// quantization slack X_max * T / N of the lattice oracle.
inline double grid_slack_bits(const hbct::Allocation& oracle_best,
                              const hbct::Allocation& solver, double block_duration,
                              int resolution) {
  double max_rate = 0.0;
  for (double x : oracle_best.slot_rate_bps) max_rate = std::max(max_rate, x);
  for (double x : solver.slot_rate_bps) max_rate = std::max(max_rate, x);
  return max_rate * block_duration / resolution;
}

}  // namespace testutil
