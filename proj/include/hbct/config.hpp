#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hbct/dual_search.hpp"
#include "hbct/experiments.hpp"
#include "hbct/primal_oracle.hpp"
#include "hbct/system_params.hpp"

namespace hbct {

/// Fully resolved run configuration. Stored in the flat key=value form the
/// CLI reads and embeds into every output file; powers are kept in dB here
/// and converted to linear when building SystemParams.
struct RunConfig {
  int hops = 3;
  double block_duration = 1.0;
  double pt_db = 40.0;
  double ip_db = 0.0;
  double zeta = 0.8;
  double sigma2 = 1.0;
  double bandwidth_hz = 1e6;
  // Empty means: the deployment default rate for `hops`, replicated.
  std::vector<double> backscatter_rates_bps;
  double alpha = 2.0;
  double d0 = 1.0;
  Vec2 pt_position{-8.0, 10.0};
  Vec2 pr_position{-2.0, 10.0};
  Vec2 source_position{-10.0, 0.0};
  Vec2 destination_position{0.0, 0.0};
  bool fading = true;

  std::uint64_t seed = 1;
  int trials = 500;
  SweepKind sweep_kind = SweepKind::kPtPowerDb;
  std::vector<double> sweep_values;  // empty = default grid for the kind

  int restarts = 8;
  int max_evals = 2000;
  double nm_tol = 1e-6;

  int grid_resolution = 64;
  int threads = 0;          // 0 = all cores; never embedded in outputs
  std::string out;          // output path; never embedded in outputs

  SystemParams to_params() const;            // validated
  SearchOptions to_search_options() const;   // seed derived from `seed`
  std::vector<double> resolved_sweep_values() const;
};

/// Applies one key=value assignment. Unknown keys and malformed values
/// throw ValidationError naming the key.
void apply_key(RunConfig& config, const std::string& key, const std::string& value);

/// Parses a flat key=value config ('#' starts a comment). Also accepts any
/// output file this tool wrote: when the first line is the output sentinel,
/// only the embedded "# cfg: key=value" lines are read.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Canonical key=value block, one key per line, fixed order. `embeddable`
/// drops the keys that must not affect reproducibility (threads, out).
std::string canonical_config(const RunConfig& config, bool embeddable = false);

/// Sentinel written as the first line of every output file.
inline constexpr const char* kOutputSentinel = "# hbct-output v1";

/// The "# cfg: ..." block for output files (sentinel included).
std::vector<std::string> config_preamble(const RunConfig& config);

}  // namespace hbct
