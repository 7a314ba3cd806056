#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nisio/grid.hpp"
#include "nisio/kernels.hpp"
#include "nisio/levy.hpp"
#include "nisio/semigroup.hpp"

namespace nisio::mc {

/// Piecewise-constant control: on interval j of the partition the member
/// feedback[j][p] is used, p the grid point nearest to the state at t_j.
struct SimpleStrategy {
  Partition partition{{0.0}};
  std::vector<std::vector<int>> feedback;

  /// Throws ConfigError unless there is one full-grid map per interval with
  /// indices in range.
  void validate(const DiscreteFamily& fam) const;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n_paths)
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
};

/// Feedback = the recorded maximizers of the dyadic iterate. Throws
/// ConfigError if `level` is not the level whose argmax was recorded.
SimpleStrategy extract_strategy(const NisioResult& result, int level);

SimpleStrategy constant_strategy(const DiscreteFamily& fam, const Partition& pi, int member);
/// Independent uniform member per grid point and interval.
SimpleStrategy random_strategy(const DiscreteFamily& fam, const Partition& pi, RngStream& rng);

class PathSimulator {
 public:
  explicit PathSimulator(const DiscreteFamily& fam);

  /// Terminal state of the controlled path started at x0. The strategy's
  /// partition must end at t.
  Point simulate(const SimpleStrategy& strat, const Point& x0, double t, RngStream& rng) const;

 private:
  const DiscreteFamily* fam_;
  std::vector<IncrementSampler> samplers_;
};

Point simulate_path(const DiscreteFamily& fam, const SimpleStrategy& strat, const Point& x0, double t,
                    RngStream& rng);

/// Mean and standard error of f(X_t) over n_paths >= 100 paths, path i
/// driven by RngStream::for_path(seed, i). The reduction runs in path order,
/// so both executions give identical bits.
McEstimate estimate(const DiscreteFamily& fam, const SimpleStrategy& strat, const InitialFunction& f,
                    const Point& x0, double t, std::size_t n_paths, std::uint64_t seed,
                    kernels::Execution exec = kernels::Execution::parallel);

/// Estimated value lost by looking the feedback up at the nearest grid point.
/// For every step of the dyadic iterate and every pair of neighbours a, b with
/// different maximizers, the losses J V - S_mu V of swapping their choices are
/// averaged (the loss at distance h/2 under a linear model); the largest such
/// value per step is summed over steps.
double snapping_tolerance(const DiscreteFamily& fam, const GridFunction& f, double t, int level);

struct NamedStrategy {
  std::string name;
  SimpleStrategy strategy;
};

struct StrategyRow {
  std::string name;
  McEstimate estimate;
  bool bound_ok = true;
};

struct DualBoundReport {
  double nisio_value = 0.0;
  double scheme_tol = 0.0;
  std::vector<StrategyRow> rows;
  std::vector<double> running_max;
  std::size_t best = 0;
  double best_gap = 0.0;  // nisio_value - best mean
  bool all_ok = true;
};

/// Every simple strategy gives a lower bound: checks
/// mean <= nisio_value + 3 stderr + scheme_tol for each strategy.
DualBoundReport dual_bound_suite(const DiscreteFamily& fam, const InitialFunction& f, const Point& x0, double t,
                                 const std::vector<NamedStrategy>& strategies, std::size_t n_paths,
                                 std::uint64_t seed, double nisio_value, double scheme_tol);

}  // namespace nisio::mc
