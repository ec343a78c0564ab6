#include <doctest.h>

#include <cmath>
#include <vector>

#include "hbct/channel.hpp"
#include "hbct/dual_search.hpp"
#include "hbct/inner_solver.hpp"
#include "hbct/primal_oracle.hpp"
#include "hbct/rng.hpp"
#include "test_util.hpp"

using namespace hbct;

namespace {

SearchOptions quick_options(int restarts = 4) {
  SearchOptions opts;
  opts.restarts = restarts;
  opts.max_evaluations = 600;
  opts.seed = 11;
  return opts;
}

}  // namespace

TEST_CASE("single-hop delivery does not depend on the multiplier") {
  SystemParams params = testutil::without_fading(testutil::default_scenario());
  params.num_hops = 1;
  params.backscatter_rates_bps = {0.01e6};
  params = validate_params(params);
  const ChannelRealization ch = sample_channels(place_nodes(params), params, 5);

  const Allocation direct = hbct_inner(DualWeights::uniform(1), ch, params);
  const SearchResult searched = optimize_lambda(ch, params, quick_options());
  CHECK(searched.allocation.delivery_bits == direct.delivery_bits);
  CHECK(searched.allocation.tau0 == direct.tau0);
}

TEST_CASE("the inner solution is invariant under multiplier rescaling") {
  const SystemParams params = testutil::default_scenario();
  const Topology topo = place_nodes(params);
  SplitMix64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const ChannelRealization ch =
        sample_channels(topo, params, derive_seed(17, static_cast<std::uint64_t>(trial)));
    std::vector<double> raw(3);
    for (double& v : raw) v = std::exp(rng.uniform(-2.0, 2.0));

    const Allocation base = hbct_inner(DualWeights(raw), ch, params);

    // Power-of-two scaling is exact in floating point: bitwise identical.
    std::vector<double> dyadic = raw;
    for (double& v : dyadic) v *= 1024.0;
    const Allocation scaled = hbct_inner(DualWeights(dyadic), ch, params);
    CHECK(scaled.delivery_bits == base.delivery_bits);
    CHECK(scaled.tau == base.tau);
    CHECK(scaled.mode == base.mode);
    CHECK(scaled.power == base.power);

    // Arbitrary scaling agrees to rounding error after normalization.
    std::vector<double> odd = raw;
    for (double& v : odd) v *= 3.0;
    const Allocation odd_scaled = hbct_inner(DualWeights(odd), ch, params);
    CHECK(odd_scaled.delivery_bits ==
          doctest::Approx(base.delivery_bits).epsilon(1e-12));
  }
}

TEST_CASE("optimize_lambda is deterministic and monotone in restarts") {
  const SystemParams params = testutil::default_scenario();
  const ChannelRealization ch = sample_channels(place_nodes(params), params, 77);

  const SearchResult once = optimize_lambda(ch, params, quick_options(5));
  const SearchResult twice = optimize_lambda(ch, params, quick_options(5));
  CHECK(once.allocation.delivery_bits == twice.allocation.delivery_bits);
  CHECK(once.weights.values() == twice.weights.values());

  double previous = 0.0;
  for (int restarts = 1; restarts <= 5; ++restarts) {
    const SearchResult result = optimize_lambda(ch, params, quick_options(restarts));
    CHECK(result.allocation.delivery_bits >= previous);
    previous = result.allocation.delivery_bits;
  }
}

TEST_CASE("saturated backscatter rates make the search land on the fixed split") {
  // Rates far above any conventional rate: every multiplier selects
  // backscatter everywhere and delivery is T / sum(1/B), multiplier-free.
  SystemParams params = testutil::default_scenario();
  params.backscatter_rates_bps = {1e12, 2e12, 4e12};
  params = validate_params(params);
  const ChannelRealization ch = sample_channels(place_nodes(params), params, 3);

  const double expected = 1.0 / (1.0 / 1e12 + 1.0 / 2e12 + 1.0 / 4e12);
  const SearchResult result = optimize_lambda(ch, params, quick_options());
  for (int c : result.allocation.mode) CHECK(c == 1);
  CHECK(result.allocation.delivery_bits == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("optimize_lambda reports an infeasible scenario") {
  SystemParams params = testutil::without_fading(testutil::default_scenario());
  params.pt_power = 0.0;
  params.backscatter_rates_bps = {3.8e6, 0.0, 3.8e6};  // hop 2 is dead
  const ChannelRealization ch = sample_channels(place_nodes(params), params, 1);
  CHECK_THROWS_WITH_AS(optimize_lambda(ch, params, quick_options()),
                       doctest::Contains("infeasible scenario"), NumericalError);
}

TEST_CASE("two-hop search lands inside the oracle band") {
  SystemParams params = testutil::without_fading(testutil::default_scenario());
  params.num_hops = 2;
  params.backscatter_rates_bps = {1.2e6, 1.2e6};
  params = validate_params(params);
  const ChannelRealization ch = sample_channels(place_nodes(params), params, 9);

  const SearchResult result = optimize_lambda(ch, params, SearchOptions{});
  const GridSpec grid{64, 64};
  const OracleResult oracle = brute_force_primal(ch, params, grid);
  const double slack = testutil::grid_slack_bits(oracle.best, result.allocation,
                                                 params.block_duration, grid.time_resolution);
  CHECK(result.allocation.delivery_bits >= 0.98 * oracle.delivery_bits);
  CHECK(result.allocation.delivery_bits <= 1.02 * oracle.delivery_bits + slack);
}
