#include "hbct/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "hbct/baselines.hpp"
#include "hbct/channel.hpp"
#include "hbct/errors.hpp"
#include "hbct/rng.hpp"

namespace hbct {

namespace {

constexpr std::uint64_t kSearchSeedTag = 0xA11C0DE5ull;

std::string format_value(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

struct TrialOutcome {
  double hbct_bits = 0.0;
  double jotpa_bits = 0.0;
  double ab_bits = 0.0;
  std::vector<int> hbct_mode;
  std::vector<double> hbct_tau;   // tau0 first
  std::vector<double> jotpa_tau;  // tau0 first
  std::vector<double> ab_tau;     // tau0 first
  std::string dominance_failure;  // empty when the dominance property held
};

std::vector<double> with_tau0(const Allocation& alloc) {
  std::vector<double> out;
  out.reserve(alloc.tau.size() + 1);
  out.push_back(alloc.tau0);
  out.insert(out.end(), alloc.tau.begin(), alloc.tau.end());
  return out;
}

TrialOutcome run_trial(const Topology& topo, const SystemParams& params,
                       const SearchOptions& search, std::uint64_t master_seed, int trial) {
  const std::uint64_t channel_seed = derive_seed(master_seed, static_cast<std::uint64_t>(trial));

  SearchOptions opts = search;
  opts.seed = derive_seed(channel_seed, kSearchSeedTag);

  const ChannelRealization ch = sample_channels(topo, params, channel_seed);
  const SearchResult hbct_result = optimize_lambda(ch, params, opts);
  const SearchResult jotpa_result = jotpa(ch, params, opts);
  const Allocation ab_result = ab(ch, params);

  TrialOutcome out;
  out.hbct_bits = hbct_result.allocation.delivery_bits;
  out.jotpa_bits = jotpa_result.allocation.delivery_bits;
  out.ab_bits = ab_result.delivery_bits;
  out.hbct_mode = hbct_result.allocation.mode;
  out.hbct_tau = with_tau0(hbct_result.allocation);
  out.jotpa_tau = with_tau0(jotpa_result.allocation);
  out.ab_tau = with_tau0(ab_result);

  const double reference = std::max(out.jotpa_bits, out.ab_bits);
  if (out.hbct_bits < reference - 1e-6 * out.hbct_bits) {
    out.dominance_failure = "trial " + std::to_string(trial) + ": HBCT " +
                            format_value(out.hbct_bits) + " bits < max(JOTPA " +
                            format_value(out.jotpa_bits) + ", AB " + format_value(out.ab_bits) +
                            ") bits";
  }
  return out;
}

AlgoStats aggregate(const std::vector<TrialOutcome>& outcomes,
                    double TrialOutcome::*bits_member,
                    std::vector<double> TrialOutcome::*tau_member, int k_hops,
                    int tendency_mode) {
  AlgoStats stats;
  stats.tendency.assign(static_cast<size_t>(k_hops), 0.0);
  stats.mean_tau.assign(static_cast<size_t>(k_hops) + 1, 0.0);
  const double n = static_cast<double>(outcomes.size());
  for (const TrialOutcome& outcome : outcomes) {
    stats.mean_delivery_bits += outcome.*bits_member / n;
    const auto& tau = outcome.*tau_member;
    for (size_t i = 0; i < tau.size(); ++i) stats.mean_tau[i] += tau[i] / n;
    if (tendency_mode < 0) {
      for (size_t k = 0; k < outcome.hbct_mode.size(); ++k) {
        stats.tendency[k] += outcome.hbct_mode[k] / n;
      }
    }
  }
  if (tendency_mode >= 0) {
    stats.tendency.assign(static_cast<size_t>(k_hops), static_cast<double>(tendency_mode));
  }
  return stats;
}

}  // namespace

double deployment_backscatter_rate_bps(int hops) {
  switch (hops) {
    case 1: return 0.01e6;
    case 2: return 1.2e6;
    case 3: return 3.8e6;
    case 4: return 4.5e6;
    case 5: return 5.0e6;
    default:
      throw ValidationError("deployment_backscatter_rate_bps: no rate defined for " +
                            std::to_string(hops) + " hops (supported: 1..5)");
  }
}

SweepResult run_sweep(SweepKind kind, const std::vector<double>& values, int trials,
                      const SystemParams& params, std::uint64_t seed,
                      const SearchOptions& search, int threads) {
  if (values.empty()) throw ValidationError("run_sweep: values must be non-empty");
  if (trials < 1) throw ValidationError("run_sweep: trials must be >= 1");
  if (threads < 0) throw ValidationError("run_sweep: threads must be >= 0");

  int worker_count = threads;
  if (worker_count == 0) {
    worker_count = static_cast<int>(std::thread::hardware_concurrency());
    if (worker_count < 1) worker_count = 1;
  }
  worker_count = std::min(worker_count, trials);

  SweepResult result;
  result.kind = kind;
  result.trials = trials;
  result.seed = seed;

  for (double value : values) {
    SystemParams point_params = params;
    switch (kind) {
      case SweepKind::kPtPowerDb:
        point_params.pt_power = db_to_linear(value);
        break;
      case SweepKind::kIpcDb:
        point_params.interference_threshold = db_to_linear(value);
        break;
      case SweepKind::kHops: {
        const int hops = static_cast<int>(std::llround(value));
        if (std::fabs(value - hops) > 1e-9) {
          throw ValidationError("run_sweep: hop counts must be integers");
        }
        point_params.num_hops = hops;
        point_params.backscatter_rates_bps.assign(static_cast<size_t>(hops),
                                                  deployment_backscatter_rate_bps(hops));
        break;
      }
    }
    point_params = validate_params(point_params);
    const Topology topo = place_nodes(point_params);

    std::vector<TrialOutcome> outcomes(static_cast<size_t>(trials));
    std::vector<std::string> errors(static_cast<size_t>(trials));
    std::atomic<int> next_trial{0};
    auto worker = [&]() {
      for (;;) {
        const int trial = next_trial.fetch_add(1);
        if (trial >= trials) return;
        try {
          outcomes[static_cast<size_t>(trial)] =
              run_trial(topo, point_params, search, seed, trial);
        } catch (const std::exception& e) {
          errors[static_cast<size_t>(trial)] = e.what();
        }
      }
    };
    if (worker_count == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<size_t>(worker_count));
      for (int w = 0; w < worker_count; ++w) pool.emplace_back(worker);
      for (std::thread& t : pool) t.join();
    }

    // Deterministic error reporting: the lowest failing trial index wins.
    for (int t = 0; t < trials; ++t) {
      if (!errors[static_cast<size_t>(t)].empty()) {
        throw NumericalError("run_sweep: trial " + std::to_string(t) + " at sweep value " +
                             format_value(value) + ": " + errors[static_cast<size_t>(t)]);
      }
      const std::string& dom = outcomes[static_cast<size_t>(t)].dominance_failure;
      if (!dom.empty()) {
        throw PropertyViolation("run_sweep: dominance violated at sweep value " +
                                format_value(value) + ": " + dom);
      }
    }

    SweepPoint point;
    point.sweep_value = value;
    point.hops = point_params.num_hops;
    point.hbct = aggregate(outcomes, &TrialOutcome::hbct_bits, &TrialOutcome::hbct_tau,
                           point_params.num_hops, -1);
    point.jotpa = aggregate(outcomes, &TrialOutcome::jotpa_bits, &TrialOutcome::jotpa_tau,
                            point_params.num_hops, 0);
    point.ab = aggregate(outcomes, &TrialOutcome::ab_bits, &TrialOutcome::ab_tau,
                         point_params.num_hops, 1);
    result.points.push_back(std::move(point));
  }
  return result;
}

namespace {

const char* const kAlgoNames[3] = {"HBCT", "JOTPA", "AB"};

int max_hops(const SweepResult& result) {
  int m = 0;
  for (const SweepPoint& p : result.points) m = std::max(m, p.hops);
  return m;
}

void write_table(std::ostream& out, const SweepResult& result, char sep,
                 const char* missing_field) {
  const int width = max_hops(result);
  out << "sweep_value" << sep << "algo" << sep << "mean_delivery_bits";
  for (int k = 1; k <= width; ++k) out << sep << "tendency_su" << k;
  for (int k = 0; k <= width; ++k) out << sep << "mean_tau" << k;
  out << sep << "trials" << sep << "seed\n";

  for (const SweepPoint& point : result.points) {
    const AlgoStats* stats[3] = {&point.hbct, &point.jotpa, &point.ab};
    for (int a = 0; a < 3; ++a) {
      out << format_value(point.sweep_value) << sep << kAlgoNames[a] << sep
          << format_value(stats[a]->mean_delivery_bits);
      for (int k = 0; k < width; ++k) {
        out << sep;
        if (k < point.hops) {
          out << format_value(stats[a]->tendency[static_cast<size_t>(k)]);
        } else {
          out << missing_field;
        }
      }
      for (int k = 0; k <= width; ++k) {
        out << sep;
        if (k <= point.hops) {
          out << format_value(stats[a]->mean_tau[static_cast<size_t>(k)]);
        } else {
          out << missing_field;
        }
      }
      out << sep << result.trials << sep << result.seed << "\n";
    }
  }
}

}  // namespace

void export_csv(const SweepResult& result, const std::string& path,
                const std::vector<std::string>& preamble) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ValidationError("export_csv: cannot open '" + path + "' for writing");
  for (const std::string& line : preamble) file << line << "\n";
  write_table(file, result, ',', "");
  file.flush();
  if (!file) throw ValidationError("export_csv: write failed for '" + path + "'");
}

void export_plot_data(const SweepResult& result, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ValidationError("export_plot_data: cannot open '" + path + "' for writing");
  write_table(file, result, ' ', "nan");
  file.flush();
  if (!file) throw ValidationError("export_plot_data: write failed for '" + path + "'");
}

std::string to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::kPtPowerDb: return "pt_power";
    case SweepKind::kHops: return "hops";
    case SweepKind::kIpcDb: return "ipc";
  }
  return "unknown";
}

SweepKind sweep_kind_from_string(const std::string& name) {
  if (name == "pt_power") return SweepKind::kPtPowerDb;
  if (name == "hops") return SweepKind::kHops;
  if (name == "ipc") return SweepKind::kIpcDb;
  throw ValidationError("sweep_kind: expected pt_power, hops, or ipc (got '" + name + "')");
}

}  // namespace hbct
