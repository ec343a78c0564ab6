#pragma once

#include "hbct/dual_search.hpp"
#include "hbct/system_params.hpp"

namespace hbct {

/// Conventional-only reference: the HBCT pipeline with the mode switch
/// pinned to conventional (implemented by zeroing the backscatter rates,
/// which forces every c_k = 0 and leaves the rest of the math untouched).
SearchResult jotpa(const ChannelRealization& ch, const SystemParams& params,
                   const SearchOptions& opts = {});

/// Backscatter-only reference. Closed form: tau0 = 0,
/// tau_k = T / (B_k^b sum_i 1/B_i^b), delivery = T / sum_i (1/B_i^b).
/// Independent of the channel draw and of the primary's power.
Allocation ab(const ChannelRealization& ch, const SystemParams& params);

}  // namespace hbct
