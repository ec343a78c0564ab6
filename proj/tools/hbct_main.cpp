// Command-line front end: solve one block, run Monte-Carlo sweeps, compare
// against the brute-force oracle, or run the invariant selftest. All
// randomness flows from the single `seed` config key; re-running any
// command from the config block embedded in its output reproduces the
// output byte for byte.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hbct/baselines.hpp"
#include "hbct/channel.hpp"
#include "hbct/config.hpp"
#include "hbct/dual_search.hpp"
#include "hbct/errors.hpp"
#include "hbct/experiments.hpp"
#include "hbct/inner_solver.hpp"
#include "hbct/primal_oracle.hpp"
#include "hbct/rng.hpp"
#include "hbct/system_params.hpp"

namespace {

using namespace hbct;

std::string fmt(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

struct Flags {
  std::optional<std::string> config_path;
  std::vector<std::pair<std::string, std::string>> overrides;  // key, value
};

// Defaults, then config file, then command-line overrides.
RunConfig resolve_config(const Flags& flags) {
  RunConfig config;
  if (flags.config_path) config = parse_config_file(*flags.config_path);
  for (const auto& [key, value] : flags.overrides) apply_key(config, key, value);
  return config;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ValidationError("cannot open '" + path + "' for writing");
  for (const std::string& line : lines) file << line << "\n";
  file.flush();
  if (!file) throw ValidationError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// solve: one channel realization, full report
// ---------------------------------------------------------------------------

int cmd_solve(const RunConfig& config) {
  const SystemParams params = config.to_params();
  const Topology topo = place_nodes(params);
  const ChannelRealization ch = sample_channels(topo, params, derive_seed(config.seed, 0));
  const SearchResult result = optimize_lambda(ch, params, config.to_search_options());
  const Allocation& alloc = result.allocation;

  std::vector<std::string> report;
  report.push_back("feasible=" + std::string(alloc.feasible ? "1" : "0"));
  report.push_back("delivery_bits=" + fmt(alloc.delivery_bits));
  report.push_back("tau0_s=" + fmt(alloc.tau0));
  report.push_back("search_evaluations=" + std::to_string(result.evaluations));
  for (int k = 0; k < params.num_hops; ++k) {
    const size_t i = static_cast<size_t>(k);
    const std::string suffix = "_" + std::to_string(k + 1);
    report.push_back("lambda" + suffix + "=" + fmt(result.weights[k]));
    report.push_back("c" + suffix + "=" + std::to_string(alloc.mode[i]));
    report.push_back("p" + suffix + "=" + fmt(alloc.power[i]));
    report.push_back("tau" + suffix + "_s=" + fmt(alloc.tau[i]));
    report.push_back("omega" + suffix + "_bps=" + fmt(alloc.conventional_rate_bps[i]));
    report.push_back("x" + suffix + "_bps=" + fmt(alloc.slot_rate_bps[i]));
    report.push_back("bits" + suffix + "=" + fmt(alloc.per_link_bits[i]));
  }
  for (const std::string& line : report) std::cout << line << "\n";

  std::vector<std::string> lines = config_preamble(config);
  lines.push_back("key,value");
  for (const std::string& line : report) {
    std::string csv_line = line;
    const size_t eq = csv_line.find('=');
    csv_line[eq] = ',';
    lines.push_back(csv_line);
  }
  const std::string path = config.out.empty() ? "hbct_solve.csv" : config.out;
  write_lines(path, lines);
  std::cout << "wrote " << path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sweep: Monte-Carlo sweep, CSV + plot data
// ---------------------------------------------------------------------------

int cmd_sweep(const RunConfig& config) {
  const SystemParams params = config.to_params();
  const SweepResult result =
      run_sweep(config.sweep_kind, config.resolved_sweep_values(), config.trials, params,
                config.seed, config.to_search_options(), config.threads);
  const std::string path = config.out.empty() ? "hbct_sweep.csv" : config.out;
  export_csv(result, path, config_preamble(config));
  export_plot_data(result, path + ".dat");
  std::cout << "wrote " << path << " and " << path << ".dat ("
            << result.points.size() << " sweep points x " << config.trials << " trials)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// oracle: brute-force comparison on small instances
// ---------------------------------------------------------------------------

int cmd_oracle(const RunConfig& config) {
  const SystemParams params = config.to_params();
  if (params.num_hops > 3) {
    throw ValidationError("oracle: limited to hops <= 3");
  }
  const Topology topo = place_nodes(params);
  const ChannelRealization ch = sample_channels(topo, params, derive_seed(config.seed, 0));
  const GridSpec grid{config.grid_resolution, config.grid_resolution};

  const SearchResult hbct_result = optimize_lambda(ch, params, config.to_search_options());
  const OracleResult hybrid_oracle = brute_force_primal(ch, params, grid);
  const SearchResult jotpa_result = jotpa(ch, params, config.to_search_options());
  const OracleResult conventional_oracle =
      brute_force_primal(ch, params, grid, OracleModes::kConventionalOnly);

  // Grid cells quantize the slot lengths, so the solver may legitimately
  // sit above the lattice optimum by up to X_max * T / N.
  auto grid_slack = [&](const OracleResult& oracle, const Allocation& solver) {
    double max_rate = 0.0;
    for (double x : oracle.best.slot_rate_bps) max_rate = std::max(max_rate, x);
    for (double x : solver.slot_rate_bps) max_rate = std::max(max_rate, x);
    return max_rate * params.block_duration / config.grid_resolution;
  };

  std::vector<std::string> lines = config_preamble(config);
  const size_t preamble_size = lines.size();
  lines.push_back("algo,delivery_bits,oracle_bits,rel_gap,grid_slack_bits");
  bool in_band = true;
  struct Row {
    const char* name;
    double solver_bits;
    const OracleResult* oracle;
    const Allocation* alloc;
  };
  const Row rows[2] = {
      {"HBCT", hbct_result.allocation.delivery_bits, &hybrid_oracle, &hbct_result.allocation},
      {"JOTPA", jotpa_result.allocation.delivery_bits, &conventional_oracle,
       &jotpa_result.allocation},
  };
  for (const Row& row : rows) {
    const double oracle_bits = row.oracle->delivery_bits;
    const double gap = (row.solver_bits - oracle_bits) / oracle_bits;
    const double slack = grid_slack(*row.oracle, *row.alloc);
    lines.push_back(std::string(row.name) + "," + fmt(row.solver_bits) + "," +
                    fmt(oracle_bits) + "," + fmt(gap) + "," + fmt(slack));
    if (row.solver_bits < 0.98 * oracle_bits ||
        row.solver_bits > 1.02 * oracle_bits + slack) {
      in_band = false;
    }
  }
  for (size_t i = preamble_size; i < lines.size(); ++i) {
    std::cout << lines[i] << "\n";
  }
  const std::string path = config.out.empty() ? "hbct_oracle.csv" : config.out;
  write_lines(path, lines);
  std::cout << "wrote " << path << "\n";
  if (!in_band) {
    throw PropertyViolation("oracle: solver delivery outside the [-2%, +2%+grid] band");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// selftest: invariant battery
// ---------------------------------------------------------------------------

struct SelftestScope {
  bool all_passed = true;
  void check(const std::string& name, bool passed, const std::string& detail = "") {
    std::cout << (passed ? "[PASS] " : "[FAIL] ") << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!passed) all_passed = false;
  }
};

int cmd_selftest(const RunConfig& config) {
  const SystemParams params = config.to_params();
  const Topology topo = place_nodes(params);
  const int trials = std::min(config.trials, 200);
  SelftestScope scope;

  // Root residuals and allocation invariants over random multipliers.
  double worst_residual = 0.0;
  double worst_time_error = 0.0;
  double worst_ipc_excess = 0.0;
  double worst_bits_spread = 0.0;
  bool modes_binary = true;
  SplitMix64 lambda_rng(derive_seed(config.seed, 0xBEEF));
  for (int t = 0; t < trials; ++t) {
    const ChannelRealization ch =
        sample_channels(topo, params, derive_seed(config.seed, static_cast<std::uint64_t>(t)));
    std::vector<double> raw(static_cast<size_t>(params.num_hops));
    for (double& v : raw) v = std::exp(lambda_rng.uniform(-3.0, 3.0));
    const DualWeights lambda(raw);
    const std::vector<double> a_values = solve_A(lambda, ch, params);
    for (double r : kkt_residuals(a_values, lambda, ch, params)) {
      worst_residual = std::max(worst_residual, std::fabs(r));
    }
    const Allocation alloc = hbct_inner(lambda, ch, params);
    double total_time = alloc.tau0;
    double min_bits = alloc.per_link_bits[0];
    double max_bits = min_bits;
    for (int k = 0; k < params.num_hops; ++k) {
      const size_t i = static_cast<size_t>(k);
      total_time += alloc.tau[i];
      min_bits = std::min(min_bits, alloc.per_link_bits[i]);
      max_bits = std::max(max_bits, alloc.per_link_bits[i]);
      worst_ipc_excess =
          std::max(worst_ipc_excess, alloc.power[i] * ch.pr_gain[i] -
                                         params.interference_threshold * (1.0 + 1e-12));
      if (alloc.mode[i] != 0 && alloc.mode[i] != 1) modes_binary = false;
    }
    worst_time_error = std::max(worst_time_error, std::fabs(total_time - params.block_duration));
    if (alloc.feasible && max_bits > 0.0) {
      worst_bits_spread = std::max(worst_bits_spread, (max_bits - min_bits) / max_bits);
    }
  }
  scope.check("kkt_residual<=1e-9", worst_residual <= 1e-9, "worst " + fmt(worst_residual));
  scope.check("time_budget==T(1e-12)", worst_time_error <= 1e-12, "worst " + fmt(worst_time_error));
  scope.check("ipc_respected", worst_ipc_excess <= 0.0);
  scope.check("equal_bits(rel 1e-6)", worst_bits_spread <= 1e-6, "worst " + fmt(worst_bits_spread));
  scope.check("modes_binary", modes_binary);

  // Scale invariance: a power-of-two multiplier rescaling normalizes away.
  {
    const ChannelRealization ch = sample_channels(topo, params, derive_seed(config.seed, 0));
    const DualWeights base = DualWeights::uniform(params.num_hops);
    std::vector<double> scaled = base.values();
    for (double& v : scaled) v *= 1024.0;
    const Allocation a = hbct_inner(base, ch, params);
    const Allocation b = hbct_inner(DualWeights(scaled), ch, params);
    scope.check("lambda_scale_invariance",
                a.delivery_bits == b.delivery_bits && a.tau0 == b.tau0 && a.mode == b.mode);
  }

  // Dominance over both references, per trial.
  {
    bool dominance = true;
    std::string detail;
    for (int t = 0; t < trials && dominance; ++t) {
      const ChannelRealization ch = sample_channels(
          topo, params, derive_seed(config.seed, static_cast<std::uint64_t>(t)));
      const SearchOptions opts = config.to_search_options();
      const double hbct_bits = optimize_lambda(ch, params, opts).allocation.delivery_bits;
      const double jotpa_bits = jotpa(ch, params, opts).allocation.delivery_bits;
      const double ab_bits = ab(ch, params).delivery_bits;
      if (hbct_bits < std::max(jotpa_bits, ab_bits) - 1e-6 * hbct_bits) {
        dominance = false;
        detail = "trial " + std::to_string(t) + ": HBCT " + fmt(hbct_bits) + " vs JOTPA " +
                 fmt(jotpa_bits) + ", AB " + fmt(ab_bits);
      }
    }
    scope.check("dominance", dominance, detail);
  }

  // Midpoint concavity of the primal objective.
  {
    const ChannelRealization ch = sample_channels(topo, params, derive_seed(config.seed, 1));
    const ConcavityReport report = concavity_check(ch, params, 200, derive_seed(config.seed, 2));
    scope.check("concavity(200 pairs)", report.violations == 0,
                "min margin " + fmt(report.min_margin));
  }

  // Flipping any single mode away from the selected endpoint cannot help.
  {
    bool endpoint_optimal = true;
    for (int t = 0; t < std::min(trials, 50) && endpoint_optimal; ++t) {
      const ChannelRealization ch = sample_channels(
          topo, params, derive_seed(config.seed, static_cast<std::uint64_t>(t)));
      const Allocation alloc = hbct_inner(DualWeights::uniform(params.num_hops), ch, params);
      for (int k = 0; k < params.num_hops && endpoint_optimal; ++k) {
        std::vector<int> flipped = alloc.mode;
        flipped[static_cast<size_t>(k)] = 1 - flipped[static_cast<size_t>(k)];
        try {
          const TimeAllocation times = time_allocation(flipped, alloc.conventional_rate_bps,
                                                       alloc.power[0], ch, params);
          double min_bits = std::numeric_limits<double>::infinity();
          for (int j = 0; j < params.num_hops; ++j) {
            const size_t i = static_cast<size_t>(j);
            min_bits = std::min(min_bits, times.tau[i] * times.slot_rate_bps[i]);
          }
          if (min_bits > alloc.delivery_bits * (1.0 + 1e-9)) endpoint_optimal = false;
        } catch (const NumericalError&) {
          // flipping to a dead mode: trivially no better
        }
      }
    }
    scope.check("mode_endpoint_optimality", endpoint_optimal);
  }

  if (!scope.all_passed) {
    throw PropertyViolation("selftest: at least one invariant failed");
  }
  std::cout << "selftest: all invariants hold\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"K-hop hybrid backscatter / harvest-then-transmit network simulator"};
  app.require_subcommand(1);

  Flags flags;
  std::string config_path;
  app.add_option("-c,--config", config_path,
                 "key=value config file (or a previously written output file)");

  // Every config key is also a flag; flags override the file. Values are
  // kept as the literal strings the user typed and validated by the config
  // parser, so nothing is re-rounded on the way through.
  std::vector<std::string> kv;
  app.add_option("-D,--set", kv, "override a single config key, e.g. -D pt_db=20");
  struct FlagSpec {
    const char* flag;
    const char* key;
    const char* help;
  };
  static const FlagSpec kFlagSpecs[] = {
      {"--hops", "hops", "number of hops K"},
      {"--pt-db", "pt_db", "primary transmit power, dB"},
      {"--ip-db", "ip_db", "interference threshold, dB"},
      {"--zeta", "zeta", "harvest efficiency in [0,1]"},
      {"--sigma2", "sigma2", "noise power (linear)"},
      {"--bandwidth-hz", "bandwidth_hz", "conventional bandwidth W, Hz"},
      {"--block-duration", "block_duration", "block length T, seconds"},
      {"--rates", "backscatter_rates_bps", "per-hop backscatter rates, bits/s, comma separated"},
      {"--fading", "fading", "on|off"},
      {"--seed", "seed", "master seed; all randomness derives from it"},
      {"--trials", "trials", "Monte-Carlo trials per sweep point"},
      {"--kind", "sweep_kind", "sweep kind: pt_power|hops|ipc"},
      {"--values", "sweep_values", "sweep values, comma separated"},
      {"--restarts", "restarts", "multiplier search restarts"},
      {"--max-evals", "max_evals", "objective evaluations per restart"},
      {"--nm-tol", "nm_tol", "simplex convergence tolerance"},
      {"--threads", "threads", "worker threads (0 = all cores)"},
      {"--resolution", "grid_resolution", "oracle time-grid resolution"},
      {"--out", "out", "output file path"},
  };
  std::map<std::string, std::optional<std::string>> flag_values;
  for (const FlagSpec& spec : kFlagSpecs) {
    app.add_option(spec.flag, flag_values[spec.key], spec.help);
  }

  CLI::App* solve = app.add_subcommand("solve", "solve one channel realization");
  CLI::App* sweep = app.add_subcommand("sweep", "run a Monte-Carlo sweep");
  CLI::App* oracle = app.add_subcommand("oracle", "compare against the brute-force oracle");
  CLI::App* selftest = app.add_subcommand("selftest", "run the invariant battery");
  for (CLI::App* sub : {solve, sweep, oracle, selftest}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!config_path.empty()) flags.config_path = config_path;
    for (const FlagSpec& spec : kFlagSpecs) {
      const auto& value = flag_values[spec.key];
      if (value) flags.overrides.emplace_back(spec.key, *value);
    }
    for (const std::string& assignment : kv) {
      const size_t eq = assignment.find('=');
      if (eq == std::string::npos) {
        throw ValidationError("--set expects key=value, got '" + assignment + "'");
      }
      flags.overrides.emplace_back(assignment.substr(0, eq), assignment.substr(eq + 1));
    }

    RunConfig config = resolve_config(flags);
    config.to_params();  // validate before echoing
    std::cout << "# resolved configuration\n" << canonical_config(config) << "#\n";

    if (solve->parsed()) return cmd_solve(config);
    if (sweep->parsed()) return cmd_sweep(config);
    if (oracle->parsed()) return cmd_oracle(config);
    if (selftest->parsed()) return cmd_selftest(config);
    throw ValidationError("no subcommand given");
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const PropertyViolation& e) {
    std::cerr << "property violation: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
