#include "hbct/primal_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "hbct/errors.hpp"
#include "hbct/inner_solver.hpp"
#include "hbct/rng.hpp"

namespace hbct {

namespace {

void validate_grid(const GridSpec& grid) {
  if (grid.time_resolution < 8) {
    throw ValidationError("GridSpec: time_resolution must be >= 8");
  }
  if (grid.power_resolution < 8) {
    throw ValidationError("GridSpec: power_resolution must be >= 8");
  }
}

// min over links of delivered bits for fixed modes and slot lengths, with
// each conventional power at its largest feasible value.
double evaluate_cell(const std::vector<int>& mode, const std::vector<double>& tau, double tau0,
                     const ChannelRealization& ch, const SystemParams& params,
                     std::vector<double>* power_out) {
  const size_t k_hops = mode.size();
  const double zeta_pt = params.harvest_efficiency * params.pt_power;
  double harvest_window = tau0;
  double min_bits = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < k_hops; ++k) {
    double bits = 0.0;
    double power = 0.0;
    if (mode[k] == 1) {
      bits = tau[k] * params.backscatter_rates_bps[k];
    } else if (tau[k] > 0.0) {
      const double energy_budget = zeta_pt * ch.pt_gain[k] * harvest_window;
      power = std::min(params.interference_threshold / ch.pr_gain[k], energy_budget / tau[k]);
      bits = tau[k] * conventional_rate(power, ch.data_snr[k], params.bandwidth_hz);
    }
    if (power_out) (*power_out)[k] = power;
    min_bits = std::min(min_bits, bits);
    harvest_window += tau[k];
  }
  return min_bits;
}

}  // namespace

OracleResult brute_force_primal(const ChannelRealization& ch, const SystemParams& params,
                                const GridSpec& grid, OracleModes modes) {
  if (params.num_hops > 3) {
    throw ValidationError("brute_force_primal: limited to num_hops <= 3");
  }
  validate_grid(grid);

  const int k_hops = params.num_hops;
  const int resolution = grid.time_resolution;
  const double t_total = params.block_duration;

  const int mode_patterns = modes == OracleModes::kHybrid ? (1 << k_hops) : 1;

  std::vector<int> mode(static_cast<size_t>(k_hops));
  std::vector<double> tau(static_cast<size_t>(k_hops));
  std::vector<int> ticks(static_cast<size_t>(k_hops) + 1);

  double best_bits = -1.0;
  std::vector<int> best_mode;
  std::vector<double> best_tau;
  double best_tau0 = 0.0;

  for (int pattern = 0; pattern < mode_patterns; ++pattern) {
    for (int k = 0; k < k_hops; ++k) mode[static_cast<size_t>(k)] = (pattern >> k) & 1;

    // All compositions of `resolution` ticks into tau0, tau_1..tau_K.
    std::function<void(int, int)> visit = [&](int slot, int remaining) {
      if (slot == k_hops) {
        ticks[static_cast<size_t>(k_hops)] = remaining;
        const double tau0 = t_total * ticks[0] / resolution;
        for (int k = 0; k < k_hops; ++k) {
          tau[static_cast<size_t>(k)] = t_total * ticks[static_cast<size_t>(k) + 1] / resolution;
        }
        const double bits = evaluate_cell(mode, tau, tau0, ch, params, nullptr);
        if (bits > best_bits) {
          best_bits = bits;
          best_mode = mode;
          best_tau = tau;
          best_tau0 = tau0;
        }
        return;
      }
      for (int t = 0; t <= remaining; ++t) {
        ticks[static_cast<size_t>(slot)] = t;
        visit(slot + 1, remaining - t);
      }
    };
    visit(0, resolution);
  }

  // Rebuild the winning cell in full.
  OracleResult result;
  result.delivery_bits = best_bits;
  Allocation& alloc = result.best;
  alloc.tau0 = best_tau0;
  alloc.tau = best_tau;
  alloc.mode = best_mode;
  alloc.power.resize(static_cast<size_t>(k_hops));
  evaluate_cell(best_mode, best_tau, best_tau0, ch, params, &alloc.power);
  alloc.conventional_rate_bps.resize(static_cast<size_t>(k_hops));
  alloc.slot_rate_bps.resize(static_cast<size_t>(k_hops));
  alloc.energy.resize(static_cast<size_t>(k_hops));
  alloc.per_link_bits.resize(static_cast<size_t>(k_hops));
  for (size_t k = 0; k < static_cast<size_t>(k_hops); ++k) {
    alloc.conventional_rate_bps[k] =
        conventional_rate(alloc.power[k], ch.data_snr[k], params.bandwidth_hz);
    alloc.slot_rate_bps[k] = alloc.mode[k] == 1 ? params.backscatter_rates_bps[k]
                                                : alloc.conventional_rate_bps[k];
    alloc.energy[k] = alloc.mode[k] == 1 ? 0.0 : alloc.power[k] * alloc.tau[k];
    alloc.per_link_bits[k] = alloc.tau[k] * alloc.slot_rate_bps[k];
  }
  alloc.delivery_bits = best_bits;
  alloc.feasible = true;
  return result;
}

namespace {

struct PrimalPoint {
  std::vector<double> tau;  // tau0 first
  std::vector<double> phi;
  std::vector<double> energy;
};

PrimalPoint sample_feasible_point(const ChannelRealization& ch, const SystemParams& params,
                                  SplitMix64& rng) {
  const size_t k_hops = static_cast<size_t>(params.num_hops);
  const double zeta_pt = params.harvest_efficiency * params.pt_power;

  PrimalPoint point;
  point.tau.resize(k_hops + 1);
  point.phi.resize(k_hops);
  point.energy.resize(k_hops);

  // Dirichlet(1,..,1) scaled to T: uniform over the full time simplex.
  double total = 0.0;
  for (double& t : point.tau) {
    t = rng.exponential();
    total += t;
  }
  for (double& t : point.tau) t *= params.block_duration / total;

  double harvest_window = point.tau[0];
  for (size_t k = 0; k < k_hops; ++k) {
    point.phi[k] = rng.uniform01() * point.tau[k + 1];
    const double cpc_cap = zeta_pt * ch.pt_gain[k] * harvest_window;
    const double ipc_cap = params.interference_threshold / ch.pr_gain[k] * point.phi[k];
    point.energy[k] = rng.uniform01() * std::min(cpc_cap, ipc_cap);
    harvest_window += point.tau[k + 1];
  }
  return point;
}

// min over links of phi W log2(1 + e gamma / phi) + (tau - phi) B, with the
// conventional term extended by continuity to 0 at phi = 0.
double primal_bits(const PrimalPoint& point, const ChannelRealization& ch,
                   const SystemParams& params) {
  const size_t k_hops = static_cast<size_t>(params.num_hops);
  double min_bits = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < k_hops; ++k) {
    double conventional = 0.0;
    if (point.phi[k] > 0.0) {
      conventional = point.phi[k] * params.bandwidth_hz *
                     std::log2(1.0 + point.energy[k] * ch.data_snr[k] / point.phi[k]);
    }
    const double backscatter =
        (point.tau[k + 1] - point.phi[k]) * params.backscatter_rates_bps[k];
    min_bits = std::min(min_bits, conventional + backscatter);
  }
  return min_bits;
}

PrimalPoint midpoint(const PrimalPoint& a, const PrimalPoint& b) {
  PrimalPoint mid;
  auto half = [](const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = 0.5 * (x[i] + y[i]);
    return out;
  };
  mid.tau = half(a.tau, b.tau);
  mid.phi = half(a.phi, b.phi);
  mid.energy = half(a.energy, b.energy);
  return mid;
}

}  // namespace

ConcavityReport concavity_check(const ChannelRealization& ch, const SystemParams& params,
                                int trials, std::uint64_t seed) {
  if (trials < 1) throw ValidationError("concavity_check: trials must be >= 1");

  SplitMix64 rng(seed);
  ConcavityReport report;
  report.trials = trials;
  report.min_margin = std::numeric_limits<double>::infinity();
  report.max_margin = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const PrimalPoint x = sample_feasible_point(ch, params, rng);
    const PrimalPoint y = sample_feasible_point(ch, params, rng);
    const double chord = 0.5 * (primal_bits(x, ch, params) + primal_bits(y, ch, params));
    const double margin = primal_bits(midpoint(x, y), ch, params) - chord;
    report.min_margin = std::min(report.min_margin, margin);
    report.max_margin = std::max(report.max_margin, margin);
    if (margin < -1e-9) ++report.violations;
  }
  return report;
}

}  // namespace hbct
