#include "hbct/system_params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hbct {

double db_to_linear(double value_db) {
  if (!std::isfinite(value_db)) {
    throw ValidationError("db_to_linear: value must be finite");
  }
  return std::pow(10.0, value_db / 10.0);
}

double linear_to_db(double value_linear) {
  if (!(value_linear > 0.0) || !std::isfinite(value_linear)) {
    throw ValidationError("linear_to_db: value must be positive and finite");
  }
  return 10.0 * std::log10(value_linear);
}

SystemParams validate_params(SystemParams params) {
  std::ostringstream bad;
  auto flag = [&bad](const char* what) {
    if (bad.tellp() > 0) bad << "; ";
    bad << what;
  };

  if (params.num_hops < 1) flag("num_hops: must be >= 1");
  if (!(params.block_duration > 0.0) || !std::isfinite(params.block_duration))
    flag("block_duration: must be positive and finite");
  if (!(params.pt_power >= 0.0) || !std::isfinite(params.pt_power))
    flag("pt_power: must be non-negative and finite");
  if (!(params.interference_threshold >= 0.0) || !std::isfinite(params.interference_threshold))
    flag("interference_threshold: must be non-negative and finite");
  if (!(params.harvest_efficiency >= 0.0 && params.harvest_efficiency <= 1.0))
    flag("harvest_efficiency: must lie in [0,1]");
  if (!(params.noise_power > 0.0) || !std::isfinite(params.noise_power))
    flag("noise_power: must be positive and finite");
  if (!(params.bandwidth_hz > 0.0) || !std::isfinite(params.bandwidth_hz))
    flag("bandwidth_hz: must be positive and finite");
  if (params.num_hops >= 1 &&
      params.backscatter_rates_bps.size() != static_cast<size_t>(params.num_hops))
    flag("backscatter_rates_bps: need one rate per hop");
  for (double rate : params.backscatter_rates_bps) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
      flag("backscatter_rates_bps: rates must be non-negative and finite");
      break;
    }
  }
  if (!(params.path_loss_exponent > 0.0) || !std::isfinite(params.path_loss_exponent))
    flag("path_loss_exponent: must be positive and finite");
  if (!(params.reference_distance > 0.0) || !std::isfinite(params.reference_distance))
    flag("reference_distance: must be positive and finite");

  if (bad.tellp() > 0) {
    throw ValidationError("invalid parameters: " + bad.str());
  }
  return params;
}

DualWeights::DualWeights(std::vector<double> raw) : lambda_(std::move(raw)) {
  if (lambda_.empty()) {
    throw ValidationError("DualWeights: empty multiplier vector");
  }
  double max_value = 0.0;
  for (double v : lambda_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("DualWeights: multipliers must be non-negative and finite");
    }
    max_value = std::max(max_value, v);
  }
  if (!(max_value > 0.0)) {
    throw ValidationError("DualWeights: at least one multiplier must be positive");
  }
  for (double& v : lambda_) v /= max_value;
}

DualWeights DualWeights::uniform(int num_hops) {
  if (num_hops < 1) throw ValidationError("DualWeights: num_hops must be >= 1");
  return DualWeights(std::vector<double>(static_cast<size_t>(num_hops), 1.0));
}

}  // namespace hbct
