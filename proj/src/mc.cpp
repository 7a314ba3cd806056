#include "nisio/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nisio/errors.hpp"

namespace nisio::mc {

void SimpleStrategy::validate(const DiscreteFamily& fam) const {
  if (feedback.size() != partition.steps()) throw ConfigError("strategy: one feedback map per interval required");
  for (const auto& map : feedback) {
    if (map.size() != fam.grid().size()) throw ConfigError("strategy: feedback must cover every grid point");
    for (int idx : map)
      if (idx < 0 || std::size_t(idx) >= fam.size()) throw ConfigError("strategy: member index out of range");
  }
}

SimpleStrategy extract_strategy(const NisioResult& result, int level) {
  if (level != result.argmax_level || result.argmax.per_step.empty())
    throw ConfigError("extract_strategy: argmax was not recorded at level " + std::to_string(level));
  return {Partition::dyadic(result.t, level), result.argmax.per_step};
}

SimpleStrategy constant_strategy(const DiscreteFamily& fam, const Partition& pi, int member) {
  if (member < 0 || std::size_t(member) >= fam.size()) throw ConfigError("constant_strategy: member out of range");
  return {pi, std::vector<std::vector<int>>(pi.steps(), std::vector<int>(fam.grid().size(), member))};
}

SimpleStrategy random_strategy(const DiscreteFamily& fam, const Partition& pi, RngStream& rng) {
  SimpleStrategy s{pi, {}};
  for (std::size_t j = 0; j < pi.steps(); ++j) {
    std::vector<int> map(fam.grid().size());
    for (int& m : map) m = int(rng.bits() % fam.size());
    s.feedback.push_back(std::move(map));
  }
  return s;
}

PathSimulator::PathSimulator(const DiscreteFamily& fam) : fam_(&fam) {
  samplers_.reserve(fam.size());
  for (const auto& q : fam.family().members()) samplers_.emplace_back(q);
}

Point PathSimulator::simulate(const SimpleStrategy& strat, const Point& x0, double t, RngStream& rng) const {
  if (std::abs(strat.partition.end() - t) > 1e-12 * std::max(1.0, t))
    throw ConfigError("simulate_path: strategy partition does not end at t");
  const auto& grid = fam_->grid();
  Point x = wrap_point(x0, grid.dim());
  for (std::size_t j = 0; j < strat.partition.steps(); ++j) {
    int member = strat.feedback[j][grid.nearest(x)];
    Point dx = samplers_[member].sample(strat.partition.step(j), rng);
    x = wrap_point({x[0] + dx[0], x[1] + dx[1]}, grid.dim());
  }
  return x;
}

Point simulate_path(const DiscreteFamily& fam, const SimpleStrategy& strat, const Point& x0, double t,
                    RngStream& rng) {
  strat.validate(fam);
  return PathSimulator(fam).simulate(strat, x0, t, rng);
}

McEstimate estimate(const DiscreteFamily& fam, const SimpleStrategy& strat, const InitialFunction& f,
                    const Point& x0, double t, std::size_t n_paths, std::uint64_t seed, kernels::Execution exec) {
  if (n_paths < 100) throw ConfigError("estimate needs at least 100 paths");
  strat.validate(fam);
  const PathSimulator sim(fam);
  std::vector<double> values(n_paths);
  auto run = [&](std::size_t i) {
    RngStream rng = RngStream::for_path(seed, i);
    values[i] = f.evaluate(sim.simulate(strat, x0, t, rng));
  };
  if (exec == kernels::Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(n_paths); ++i) run(std::size_t(i));
  } else {
    for (std::size_t i = 0; i < n_paths; ++i) run(i);
  }
  // Welford in path order.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n_paths; ++i) {
    double delta = values[i] - mean;
    mean += delta / double(i + 1);
    m2 += delta * (values[i] - mean);
  }
  double variance = m2 / double(n_paths - 1);
  return {mean, std::sqrt(variance / double(n_paths)), n_paths, seed};
}

double snapping_tolerance(const DiscreteFamily& fam, const GridFunction& f, double t, int level) {
  if (!(t > 0.0)) throw ConfigError("snapping_tolerance needs t > 0");
  const auto& grid = fam.grid();
  const std::size_t steps = std::size_t(1) << level;
  SupStep step(fam, t / double(steps));
  GridFunction v = f;
  std::vector<int> arg;
  std::vector<std::vector<double>> members;
  double total = 0.0;
  for (std::size_t s = 0; s < steps; ++s) {
    GridFunction next = step.apply(v, &arg, kernels::Execution::parallel, &members);
    double worst = 0.0;
    auto check = [&](std::size_t a, std::size_t b) {
      if (arg[a] == arg[b]) return;
      // The loss grows linearly from the switch point between a and b; the
      // two one-sided losses add up to its slope times h, and a path is
      // never more than h/2 from its lookup point.
      worst = std::max(worst, 0.5 * ((next[a] - members[arg[b]][a]) + (next[b] - members[arg[a]][b])));
    };
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto [i0, i1] = grid.axis_indices(i);
      check(i, grid.flat(i0 + 1, i1));
      if (grid.dim() == 2) check(i, grid.flat(i0, i1 + 1));
    }
    total += worst;
    v = std::move(next);
  }
  return total;
}

DualBoundReport dual_bound_suite(const DiscreteFamily& fam, const InitialFunction& f, const Point& x0, double t,
                                 const std::vector<NamedStrategy>& strategies, std::size_t n_paths,
                                 std::uint64_t seed, double nisio_value, double scheme_tol) {
  if (n_paths < 100) throw ConfigError("dual_bound_suite needs at least 100 paths");
  DualBoundReport report;
  report.nisio_value = nisio_value;
  report.scheme_tol = scheme_tol;
  double running = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    StrategyRow row{strategies[i].name, estimate(fam, strategies[i].strategy, f, x0, t, n_paths, seed)};
    row.bound_ok = row.estimate.mean <= nisio_value + 3.0 * row.estimate.std_error + scheme_tol;
    report.all_ok = report.all_ok && row.bound_ok;
    if (row.estimate.mean > running) {
      running = row.estimate.mean;
      report.best = i;
    }
    report.running_max.push_back(running);
    report.rows.push_back(std::move(row));
  }
  if (!report.rows.empty()) report.best_gap = nisio_value - report.rows[report.best].estimate.mean;
  return report;
}

}  // namespace nisio::mc
