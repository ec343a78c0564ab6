#include "hbct/dual_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hbct/errors.hpp"
#include "hbct/inner_solver.hpp"
#include "hbct/rng.hpp"

namespace hbct {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogClamp = 40.0;  // |u_k| cap; lambda ratios up to e^80

// Objective for the simplex: delivery in bits when the inner solution is
// feasible, minus the constraint violation otherwise (delivery is strictly
// positive, so any feasible point beats any infeasible one).
class DeliveryObjective {
 public:
  DeliveryObjective(const ChannelRealization& ch, const SystemParams& params)
      : ch_(ch), params_(params), lambda_buffer_(static_cast<size_t>(params.num_hops)) {}

  double operator()(const std::vector<double>& u) {
    ++evaluations_;
    for (size_t i = 0; i < u.size(); ++i) {
      lambda_buffer_[i] = std::exp(std::clamp(u[i], -kLogClamp, kLogClamp));
    }
    try {
      const Allocation alloc = hbct_inner(DualWeights(lambda_buffer_), ch_, params_);
      return alloc.feasible ? alloc.delivery_bits : -alloc.cpc_violation;
    } catch (const NumericalError&) {
      return kNegInf;  // dead hop: no multiplier choice can fix a dead hop
    }
  }

  int evaluations() const { return evaluations_; }

 private:
  const ChannelRealization& ch_;
  const SystemParams& params_;
  std::vector<double> lambda_buffer_;
  int evaluations_ = 0;
};

struct SimplexOutcome {
  std::vector<double> best_point;
  double best_value = kNegInf;
};

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
// shrink 1/2), maximizing. Stops on simplex diameter or evaluation budget.
SimplexOutcome nelder_mead_maximize(DeliveryObjective& objective,
                                    const std::vector<double>& start, double step,
                                    int max_evaluations, double tolerance) {
  const size_t dim = start.size();
  const size_t n_vertices = dim + 1;

  std::vector<std::vector<double>> vertex(n_vertices, start);
  for (size_t i = 0; i < dim; ++i) vertex[i + 1][i] += step;

  // The initial simplex is always fully evaluated, even on a tiny budget;
  // every stored value must correspond to its vertex.
  std::vector<double> value(n_vertices);
  int used = 0;
  for (size_t i = 0; i < n_vertices; ++i, ++used) {
    value[i] = objective(vertex[i]);
  }

  std::vector<size_t> order(n_vertices);
  std::vector<double> centroid(dim), reflected(dim), trial(dim);

  while (used < max_evaluations) {
    for (size_t i = 0; i < n_vertices; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return value[a] > value[b]; });
    const size_t best = order[0];
    const size_t worst = order[n_vertices - 1];
    const size_t second_worst = order[n_vertices - 2];

    double diameter = 0.0;
    for (size_t i = 1; i < n_vertices; ++i) {
      for (size_t d = 0; d < dim; ++d) {
        diameter = std::max(diameter, std::fabs(vertex[order[i]][d] - vertex[best][d]));
      }
    }
    if (diameter < tolerance) break;

    for (size_t d = 0; d < dim; ++d) {
      double sum = 0.0;
      for (size_t i = 0; i < n_vertices; ++i) {
        if (i != worst) sum += vertex[i][d];
      }
      centroid[d] = sum / static_cast<double>(dim);
    }

    for (size_t d = 0; d < dim; ++d) {
      reflected[d] = centroid[d] + (centroid[d] - vertex[worst][d]);
    }
    const double reflected_value = objective(reflected);
    ++used;

    if (reflected_value > value[best]) {
      for (size_t d = 0; d < dim; ++d) {
        trial[d] = centroid[d] + 2.0 * (reflected[d] - centroid[d]);
      }
      const double expanded_value = objective(trial);
      ++used;
      if (expanded_value > reflected_value) {
        vertex[worst] = trial;
        value[worst] = expanded_value;
      } else {
        vertex[worst] = reflected;
        value[worst] = reflected_value;
      }
      continue;
    }
    if (reflected_value > value[second_worst]) {
      vertex[worst] = reflected;
      value[worst] = reflected_value;
      continue;
    }

    const bool outside = reflected_value > value[worst];
    for (size_t d = 0; d < dim; ++d) {
      const double toward = outside ? reflected[d] : vertex[worst][d];
      trial[d] = centroid[d] + 0.5 * (toward - centroid[d]);
    }
    const double contracted_value = objective(trial);
    ++used;
    if (contracted_value > (outside ? reflected_value : value[worst])) {
      vertex[worst] = trial;
      value[worst] = contracted_value;
      continue;
    }

    for (size_t i = 0; i < n_vertices; ++i) {
      if (i == best) continue;
      if (used >= max_evaluations) break;  // leave unshrunk vertices consistent
      for (size_t d = 0; d < dim; ++d) {
        vertex[i][d] = vertex[best][d] + 0.5 * (vertex[i][d] - vertex[best][d]);
      }
      value[i] = objective(vertex[i]);
      ++used;
    }
  }

  SimplexOutcome out;
  for (size_t i = 0; i < n_vertices; ++i) {
    if (value[i] > out.best_value || out.best_point.empty()) {
      out.best_value = value[i];
      out.best_point = vertex[i];
    }
  }
  return out;
}

}  // namespace

SearchResult optimize_lambda(const ChannelRealization& ch, const SystemParams& params,
                             const SearchOptions& opts) {
  if (opts.restarts < 1) throw ValidationError("optimize_lambda: restarts must be >= 1");
  if (opts.max_evaluations < 1) {
    throw ValidationError("optimize_lambda: max_evaluations must be >= 1");
  }
  if (!(opts.simplex_tolerance > 0.0)) {
    throw ValidationError("optimize_lambda: simplex_tolerance must be positive");
  }

  const size_t dim = static_cast<size_t>(params.num_hops);

  // Start points are generated up front, in restart order, so that a run
  // with M restarts evaluates a prefix of the runs with more restarts.
  SplitMix64 rng(opts.seed);
  std::vector<std::vector<double>> starts;
  starts.reserve(static_cast<size_t>(opts.restarts));
  starts.emplace_back(dim, 0.0);  // uniform multipliers
  for (int r = 1; r < opts.restarts; ++r) {
    std::vector<double> u(dim);
    for (double& coord : u) coord = rng.uniform(-2.0, 2.0);
    starts.push_back(std::move(u));
  }

  DeliveryObjective objective(ch, params);
  SimplexOutcome best;
  bool have_best = false;
  for (const auto& start : starts) {
    SimplexOutcome outcome = nelder_mead_maximize(objective, start, 0.5, opts.max_evaluations,
                                                  opts.simplex_tolerance);
    // Strict comparison: earlier restarts win ties.
    if (!have_best || outcome.best_value > best.best_value) {
      best = std::move(outcome);
      have_best = true;
    }
  }

  // The consumed-power constraint binds with equality at the optimum, so
  // the feasible multipliers can form a thin sliver. When every restart
  // stalls on the infeasible side, re-polish from the least-violating point
  // with progressively smaller simplices to walk onto the boundary.
  for (double step : {0.1, 0.02, 0.004}) {
    if (best.best_value > 0.0 || best.best_point.empty()) break;
    SimplexOutcome refined = nelder_mead_maximize(objective, best.best_point, step,
                                                  opts.max_evaluations,
                                                  opts.simplex_tolerance * 1e-3);
    if (refined.best_value > best.best_value) best = std::move(refined);
  }

  if (!(best.best_value > 0.0)) {
    throw NumericalError("optimize_lambda: infeasible scenario (no feasible allocation "
                         "found across restarts)");
  }

  std::vector<double> lambda(dim);
  for (size_t i = 0; i < dim; ++i) {
    lambda[i] = std::exp(std::clamp(best.best_point[i], -kLogClamp, kLogClamp));
  }
  SearchResult result{DualWeights(std::move(lambda)), Allocation{}, objective.evaluations()};
  result.allocation = hbct_inner(result.weights, ch, params);
  return result;
}

}  // namespace hbct
