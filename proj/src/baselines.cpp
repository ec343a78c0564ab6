#include "hbct/baselines.hpp"

#include <algorithm>
#include <string>

#include "hbct/errors.hpp"

namespace hbct {

SearchResult jotpa(const ChannelRealization& ch, const SystemParams& params,
                   const SearchOptions& opts) {
  SystemParams conventional = params;
  conventional.backscatter_rates_bps.assign(static_cast<size_t>(params.num_hops), 0.0);
  // A zero backscatter rate can never win the mode comparison, so the whole
  // pipeline runs unchanged with every node pinned conventional.
  return optimize_lambda(ch, conventional, opts);
}

Allocation ab(const ChannelRealization& /*ch*/, const SystemParams& params) {
  const size_t k_hops = static_cast<size_t>(params.num_hops);
  const auto& rates = params.backscatter_rates_bps;

  double inverse_sum = 0.0;
  for (size_t k = 0; k < k_hops; ++k) {
    if (!(rates[k] > 0.0)) {
      throw NumericalError("ab: dead hop " + std::to_string(k + 1) +
                           " (backscatter rate is zero)");
    }
    inverse_sum += 1.0 / rates[k];
  }

  Allocation alloc;
  alloc.tau0 = 0.0;
  alloc.tau.resize(k_hops);
  alloc.mode.assign(k_hops, 1);
  alloc.power.assign(k_hops, 0.0);
  alloc.energy.assign(k_hops, 0.0);
  alloc.conventional_rate_bps.assign(k_hops, 0.0);
  alloc.slot_rate_bps.assign(rates.begin(), rates.end());
  alloc.per_link_bits.resize(k_hops);
  double min_bits = 0.0;
  for (size_t k = 0; k < k_hops; ++k) {
    alloc.tau[k] = params.block_duration / (rates[k] * inverse_sum);
    alloc.per_link_bits[k] = alloc.tau[k] * rates[k];
    min_bits = k == 0 ? alloc.per_link_bits[k] : std::min(min_bits, alloc.per_link_bits[k]);
  }
  alloc.delivery_bits = min_bits;
  alloc.feasible = true;
  return alloc;
}

}  // namespace hbct
