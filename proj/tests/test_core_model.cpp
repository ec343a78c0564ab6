#include <doctest.h>

#include <cmath>
#include <limits>

#include "hbct/rng.hpp"
#include "hbct/system_params.hpp"
#include "test_util.hpp"

using namespace hbct;

TEST_CASE("db_to_linear hits the exact powers of ten") {
  CHECK(db_to_linear(0.0) == 1.0);
  CHECK(db_to_linear(40.0) == doctest::Approx(10000.0).epsilon(1e-15));
  CHECK(db_to_linear(-30.0) == doctest::Approx(0.001).epsilon(1e-15));
}

TEST_CASE("db_to_linear rejects non-finite input") {
  CHECK_THROWS_AS(db_to_linear(std::numeric_limits<double>::quiet_NaN()), ValidationError);
  CHECK_THROWS_AS(db_to_linear(std::numeric_limits<double>::infinity()), ValidationError);
}

TEST_CASE("db_to_linear is monotone and multiplicative") {
  SplitMix64 rng(42);
  double previous = db_to_linear(-80.0);
  for (double db = -79.0; db <= 80.0; db += 1.0) {
    const double value = db_to_linear(db);
    CHECK(value > previous);
    previous = value;
  }
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(-50.0, 50.0);
    const double b = rng.uniform(-50.0, 50.0);
    CHECK(db_to_linear(a + b) ==
          doctest::Approx(db_to_linear(a) * db_to_linear(b)).epsilon(1e-12));
  }
}

TEST_CASE("validate_params accepts the default scenario") {
  const SystemParams params = testutil::default_scenario();
  CHECK(params.num_hops == 3);
  CHECK(params.pt_power == doctest::Approx(1e4));
  CHECK(params.interference_threshold == doctest::Approx(1.0));
  CHECK(params.harvest_efficiency == doctest::Approx(0.8));
  CHECK(params.noise_power == doctest::Approx(1.0));
}

TEST_CASE("validate_params rejects out-of-range fields by name") {
  SystemParams params;
  params.harvest_efficiency = 1.2;
  CHECK_THROWS_WITH_AS(validate_params(params), doctest::Contains("harvest_efficiency"),
                       ValidationError);

  SystemParams degenerate;
  degenerate.num_hops = 0;
  CHECK_THROWS_WITH_AS(validate_params(degenerate), doctest::Contains("num_hops"),
                       ValidationError);

  SystemParams mismatched;
  mismatched.num_hops = 4;  // still three rates
  CHECK_THROWS_WITH_AS(validate_params(mismatched),
                       doctest::Contains("backscatter_rates_bps"), ValidationError);

  SystemParams negative_rate;
  negative_rate.backscatter_rates_bps[1] = -1.0;
  CHECK_THROWS_AS(validate_params(negative_rate), ValidationError);

  SystemParams zero_noise;
  zero_noise.noise_power = 0.0;
  CHECK_THROWS_WITH_AS(validate_params(zero_noise), doctest::Contains("noise_power"),
                       ValidationError);
}

TEST_CASE("validate_params reports every violation at once") {
  SystemParams params;
  params.harvest_efficiency = -0.5;
  params.block_duration = 0.0;
  try {
    validate_params(params);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    CHECK(what.find("harvest_efficiency") != std::string::npos);
    CHECK(what.find("block_duration") != std::string::npos);
  }
}

TEST_CASE("DualWeights normalizes to max 1 and validates") {
  const DualWeights weights(std::vector<double>{0.5, 2.0, 1.0});
  CHECK(weights[0] == doctest::Approx(0.25));
  CHECK(weights[1] == 1.0);
  CHECK(weights[2] == doctest::Approx(0.5));

  CHECK_THROWS_AS(DualWeights(std::vector<double>{}), ValidationError);
  CHECK_THROWS_AS(DualWeights(std::vector<double>{0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(DualWeights(std::vector<double>{1.0, -0.1}), ValidationError);

  const DualWeights uniform = DualWeights::uniform(4);
  CHECK(uniform.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(uniform[k] == 1.0);
}
