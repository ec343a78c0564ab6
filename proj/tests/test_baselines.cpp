#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hbct/baselines.hpp"
#include "hbct/channel.hpp"
#include "hbct/inner_solver.hpp"
#include "hbct/rng.hpp"
#include "test_util.hpp"

using namespace hbct;

namespace {

SearchOptions quick_options() {
  SearchOptions opts;
  opts.restarts = 4;
  opts.max_evaluations = 600;
  opts.seed = 21;
  return opts;
}

}  // namespace

TEST_CASE("jotpa equals the hybrid pipeline when backscatter is unavailable") {
  SystemParams params = testutil::without_fading(testutil::default_scenario());
  params.backscatter_rates_bps = {0.0, 0.0, 0.0};
  const ChannelRealization ch = sample_channels(place_nodes(params), params, 6);

  const SearchResult hybrid = optimize_lambda(ch, params, quick_options());
  const SearchResult conventional = jotpa(ch, params, quick_options());
  CHECK(hybrid.allocation.delivery_bits == conventional.allocation.delivery_bits);
  CHECK(hybrid.allocation.tau == conventional.allocation.tau);
  for (int c : conventional.allocation.mode) CHECK(c == 0);
}

TEST_CASE("jotpa output is conventional-only with equal per-link bits") {
  const SystemParams params = testutil::default_scenario();
  const ChannelRealization ch = sample_channels(place_nodes(params), params, 8);
  const SearchResult result = jotpa(ch, params, quick_options());
  REQUIRE(result.allocation.feasible);
  for (int c : result.allocation.mode) CHECK(c == 0);
  double min_bits = result.allocation.per_link_bits[0];
  double max_bits = min_bits;
  for (double bits : result.allocation.per_link_bits) {
    min_bits = std::min(min_bits, bits);
    max_bits = std::max(max_bits, bits);
  }
  CHECK((max_bits - min_bits) <= 1e-6 * max_bits);
}

TEST_CASE("jotpa fails without primary power") {
  SystemParams params = testutil::without_fading(testutil::default_scenario());
  params.pt_power = 0.0;
  const ChannelRealization ch = sample_channels(place_nodes(params), params, 2);
  CHECK_THROWS_AS(jotpa(ch, params, quick_options()), NumericalError);
}

TEST_CASE("ab reproduces the closed-form deliveries for the five deployments") {
  // T / sum(1/B) per deployment, frozen from the harmonic-sum arithmetic.
  const struct {
    int hops;
    double rate_bps;
    double expected_bits;
  } cases[] = {
      {1, 0.01e6, 1.0e4}, {2, 1.2e6, 6.0e5},   {3, 3.8e6, 1.2666666666666667e6},
      {4, 4.5e6, 1.125e6}, {5, 5.0e6, 1.0e6},
  };
  for (const auto& c : cases) {
    SystemParams params = testutil::default_scenario();
    params.num_hops = c.hops;
    params.backscatter_rates_bps.assign(static_cast<size_t>(c.hops), c.rate_bps);
    params = validate_params(params);
    const ChannelRealization ch = sample_channels(place_nodes(params), params, 4);

    const Allocation alloc = ab(ch, params);
    CHECK(alloc.delivery_bits == doctest::Approx(c.expected_bits).epsilon(5e-7));
    CHECK(alloc.tau0 == 0.0);
    for (size_t k = 0; k < static_cast<size_t>(c.hops); ++k) {
      CHECK(alloc.mode[k] == 1);
      CHECK(alloc.power[k] == 0.0);
      CHECK(alloc.tau[k] == doctest::Approx(1.0 / c.hops).epsilon(1e-12));
    }
  }
}

TEST_CASE("ab ignores everything but the backscatter rates") {
  SystemParams params = testutil::default_scenario();
  const ChannelRealization ch_a = sample_channels(place_nodes(params), params, 1);
  const ChannelRealization ch_b = sample_channels(place_nodes(params), params, 2);
  const Allocation base = ab(ch_a, params);

  SystemParams perturbed = params;
  perturbed.pt_power = 123.0;
  perturbed.interference_threshold = 1e-6;
  perturbed.harvest_efficiency = 0.1;
  const Allocation other = ab(ch_b, perturbed);
  CHECK(base.delivery_bits == other.delivery_bits);
  CHECK(base.tau == other.tau);
}

TEST_CASE("ab rejects a dead hop") {
  SystemParams params = testutil::default_scenario();
  params.backscatter_rates_bps[1] = 0.0;
  const ChannelRealization ch = sample_channels(place_nodes(params), params, 1);
  CHECK_THROWS_WITH_AS(ab(ch, params), doctest::Contains("dead hop"), NumericalError);
}

TEST_CASE("hybrid delivery dominates both references trial by trial") {
  const SearchOptions opts = quick_options();
  for (double pt_db : {20.0, 40.0}) {
    SystemParams params = testutil::default_scenario();
    params.pt_power = db_to_linear(pt_db);
    const Topology topo = place_nodes(params);
    for (int trial = 0; trial < 40; ++trial) {
      const ChannelRealization ch =
          sample_channels(topo, params, derive_seed(1000, static_cast<std::uint64_t>(trial)));
      const double hybrid = optimize_lambda(ch, params, opts).allocation.delivery_bits;
      const double conventional = jotpa(ch, params, opts).allocation.delivery_bits;
      const double backscatter = ab(ch, params).delivery_bits;
      CHECK(hybrid >= std::max(conventional, backscatter) - 1e-6 * hybrid);
    }
  }
}
