#pragma once

#include <cstdint>

#include "hbct/system_params.hpp"

namespace hbct {

/// Options for the outer multiplier search. The objective has kinks (the
/// power clip and the mode switches), so the search is a derivative-free
/// simplex on u with lambda_k = exp(u_k), restarted from several points.
struct SearchOptions {
  int restarts = 8;              // multi-start count; start 0 is always u = 0
  int max_evaluations = 2000;    // per restart
  double simplex_tolerance = 1e-6;  // u-space diameter at convergence
  std::uint64_t seed = 1;        // generates the non-zero start points
};

struct SearchResult {
  DualWeights weights;     // normalized argmax
  Allocation allocation;   // hbct_inner at weights
  int evaluations = 0;     // total objective evaluations
};

/// Maximizes end-to-end delivery of the inner closed-form solution over the
/// multiplier vector. Infeasible inner results contribute a negative
/// penalty equal to their constraint violation, which steers the simplex
/// back toward feasibility. Throws NumericalError("infeasible scenario...")
/// when no restart finds any feasible point.
SearchResult optimize_lambda(const ChannelRealization& ch, const SystemParams& params,
                             const SearchOptions& opts = {});

}  // namespace hbct
