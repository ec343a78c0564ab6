#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hbct/dual_search.hpp"
#include "hbct/system_params.hpp"

namespace hbct {

enum class SweepKind {
  kPtPowerDb,  // primary transmit power, values in dB
  kHops,       // network size, values are integer hop counts 1..5
  kIpcDb,      // interference threshold, values in dB
};

/// Measured backscatter link rates by deployment size (bits/s). Shorter
/// hops support faster backscatter links.
double deployment_backscatter_rate_bps(int hops);

/// Per-algorithm aggregates at one sweep point.
struct AlgoStats {
  double mean_delivery_bits = 0.0;
  std::vector<double> tendency;  // per node: Monte-Carlo mean of the binary mode
  std::vector<double> mean_tau;  // tau0 first, then per-node slots; sums to T
};

struct SweepPoint {
  double sweep_value = 0.0;
  int hops = 0;
  AlgoStats hbct;
  AlgoStats jotpa;
  AlgoStats ab;
};

struct SweepResult {
  SweepKind kind = SweepKind::kPtPowerDb;
  std::vector<SweepPoint> points;
  int trials = 0;
  std::uint64_t seed = 0;
};

/// Runs `trials` seeded channel draws per sweep value, solves HBCT, the
/// conventional-only and backscatter-only references on each, verifies the
/// per-trial dominance of HBCT before aggregating, and returns the means.
/// Channel draws depend only on (seed, trial index), so every sweep value
/// sees the same fading sample and results are independent of `threads`
/// (0 = hardware concurrency).
SweepResult run_sweep(SweepKind kind, const std::vector<double>& values, int trials,
                      const SystemParams& params, std::uint64_t seed,
                      const SearchOptions& search = {}, int threads = 0);

/// CSV with one header row and one row per (sweep value, algorithm);
/// 12 significant digits, deterministic byte-for-byte. `preamble` lines
/// (already '#'-prefixed by the caller) land before the header.
void export_csv(const SweepResult& result, const std::string& path,
                const std::vector<std::string>& preamble = {});

/// The same table, whitespace-separated with `nan` for absent columns, for
/// gnuplot-style tools.
void export_plot_data(const SweepResult& result, const std::string& path);

std::string to_string(SweepKind kind);
SweepKind sweep_kind_from_string(const std::string& name);

}  // namespace hbct
