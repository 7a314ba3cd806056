#include "nisio/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nisio/errors.hpp"

namespace nisio::oracle {

int poisson_truncation(double mean, double tail_tol) {
  if (!(tail_tol > 0.0)) throw ConfigError("tail_tol must be positive");
  if (!(mean >= 0.0)) throw ConfigError("Poisson mean must be nonnegative");
  if (mean == 0.0) return 0;
  const double log_tol = std::log(tail_tol);
  for (int n = 0; n <= 10000; ++n) {
    double k = n + 1.0;
    if (k <= mean) continue;
    double log_bound = -mean + k * (1.0 + std::log(mean / k));
    if (log_bound <= log_tol) return n;
  }
  throw BudgetError("Poisson series would need more than 10^4 terms (mean jump count " + std::to_string(mean) + ")");
}

GridFunction poisson_series_apply(const TorusGrid& grid, double rate, const std::vector<Atom>& atoms, double t,
                                  const GridFunction& f, double tail_tol) {
  if (!(f.grid() == grid)) throw ConfigError("poisson_series_apply: grid mismatch");
  if (!(rate >= 0.0) || !(t >= 0.0)) throw ConfigError("poisson_series_apply needs rate >= 0 and t >= 0");
  double total = 0.0;
  for (const auto& a : atoms) total += a.weight;
  const double mean = rate * total * t;
  if (mean == 0.0) return f;

  struct Shift {
    int d0, d1;
    double p;
  };
  std::vector<Shift> shifts;
  for (const auto& a : atoms) {
    if (grid.snap_distance(a.at) > 1e-9) throw ConfigError("poisson_series_apply: atom is not on a grid point");
    auto idx = grid.axis_indices(grid.nearest(a.at));
    // Offset of the jump from the origin, which sits at axis index n/2.
    shifts.push_back({idx[0] - grid.n() / 2, grid.dim() == 2 ? idx[1] - grid.n() / 2 : 0, a.weight / total});
  }
  const int terms = poisson_truncation(mean, tail_tol);

  auto convolve = [&](const GridFunction& g) {
    GridFunction out(grid, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto [i0, i1] = grid.axis_indices(i);
      double acc = 0.0;
      for (const auto& s : shifts) acc += s.p * g[grid.flat(i0 + s.d0, i1 + s.d1)];
      out[i] = acc;
    }
    return out;
  };

  GridFunction term = f;
  GridFunction acc(grid, 0.0);
  const double log_mean = std::log(mean);
  for (int n = 0; n <= terms; ++n) {
    if (n > 0) term = convolve(term);
    double weight = std::exp(-mean + n * log_mean - std::lgamma(n + 1.0));
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weight * term[i];
  }
  return acc;
}

double rk4_step_limit(const DiscreteFamily& fam) {
  double m = fam.symbols().max_abs();
  return m > 0.0 ? 2.5 / m : std::numeric_limits<double>::infinity();
}

Trajectory picard_solve(const DiscreteFamily& fam, const GridFunction& f, double t, double dt) {
  if (!(t > 0.0) || !(dt > 0.0)) throw ConfigError("picard_solve needs t > 0 and dt > 0");
  const auto steps = std::size_t(std::ceil(t / dt - 1e-9));
  const double h = t / double(steps);
  if (h > rk4_step_limit(fam))
    throw ConfigError("picard_solve: dt " + std::to_string(h) + " above the RK4 stability bound " +
                      std::to_string(rk4_step_limit(fam)));

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.snapshots.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.snapshots.push_back(f);
  GridFunction u = f;
  GridFunction stage(f.grid());
  auto axpy = [&](const GridFunction& base, double a, const GridFunction& k) {
    for (std::size_t i = 0; i < stage.size(); ++i) stage[i] = base[i] + a * k[i];
    return stage;
  };
  for (std::size_t s = 1; s <= steps; ++s) {
    GridFunction k1 = generator_sup(fam, u);
    GridFunction k2 = generator_sup(fam, axpy(u, 0.5 * h, k1));
    GridFunction k3 = generator_sup(fam, axpy(u, 0.5 * h, k2));
    GridFunction k4 = generator_sup(fam, axpy(u, h, k3));
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    traj.times.push_back(s == steps ? t : double(s) * h);
    traj.snapshots.push_back(u);
  }
  return traj;
}

namespace {

std::vector<int> generator_argmax(const DiscreteFamily& fam, const GridFunction& u) {
  std::vector<int> arg(u.size(), 0);
  std::vector<double> best(u.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t m = 0; m < fam.size(); ++m) {
    GridFunction g = generator_apply_single(fam.symbol(m), u);
    for (std::size_t i = 0; i < u.size(); ++i)
      if (g[i] > best[i]) {
        best[i] = g[i];
        arg[i] = int(m);
      }
  }
  return arg;
}

}  // namespace

ResidualReport residual_check(const Trajectory& traj, const DiscreteFamily& fam, int stride) {
  const std::size_t count = traj.times.size();
  if (count != traj.snapshots.size()) throw ConfigError("trajectory: times and snapshots differ in length");
  if (stride < 1) throw ConfigError("residual_check: stride must be >= 1");
  if (count < 2 * std::size_t(stride) + 1) throw ConfigError("residual_check needs at least 3 usable snapshots");
  const double spacing = traj.times[1] - traj.times[0];
  for (std::size_t i = 1; i < count; ++i)
    if (std::abs((traj.times[i] - traj.times[i - 1]) - spacing) > 1e-9 * std::max(1.0, spacing))
      throw ConfigError("residual_check: snapshots are not uniformly spaced");

  ResidualReport report;
  report.delta = stride * spacing;
  for (std::size_t i = stride; i + stride < count; ++i) {
    const auto& before = traj.snapshots[i - stride];
    const auto& now = traj.snapshots[i];
    const auto& after = traj.snapshots[i + stride];
    GridFunction gen = generator_sup(fam, now);
    std::vector<int> a0 = generator_argmax(fam, before), a1 = generator_argmax(fam, now),
                     a2 = generator_argmax(fam, after);
    GridFunction r(now.grid());
    double sup = 0.0, smooth = 0.0;
    std::size_t kinks = 0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      r[j] = std::abs((after[j] - before[j]) / (2.0 * report.delta) - gen[j]);
      sup = std::max(sup, r[j]);
      if (a0[j] == a1[j] && a1[j] == a2[j]) {
        smooth = std::max(smooth, r[j]);
      } else {
        ++kinks;
      }
    }
    report.times.push_back(traj.times[i]);
    report.sup_residual.push_back(sup);
    report.smooth_sup_residual.push_back(smooth);
    report.pointwise.push_back(std::move(r));
    report.kink_points.push_back(kinks);
  }
  return report;
}

double mass_diagnostic(const DiscreteFamily& fam, double t, double window_halfwidth) {
  if (!(window_halfwidth > 0.0) || !(window_halfwidth < std::numbers::pi))
    throw ConfigError("mass_diagnostic: window half-width must lie in (0, pi)");
  if (!(t >= 0.0)) throw ConfigError("mass_diagnostic: t must be nonnegative");
  const auto& grid = fam.grid();
  auto inf_norm = [&](const Point& p) { return std::max(std::abs(p[0]), grid.dim() == 2 ? std::abs(p[1]) : 0.0); };
  GridFunction plateau(grid, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) plateau[i] = inf_norm(grid.point(i)) <= window_halfwidth ? 1.0 : 0.0;

  double escaped = 0.0;
  for (std::size_t m = 0; m < fam.size(); ++m) {
    GridFunction v = apply_linear(fam.symbol(m), t, plateau);
    double low = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (inf_norm(grid.point(i)) <= 0.5 * window_halfwidth) low = std::min(low, v[i]);
    escaped = std::max(escaped, 1.0 - low);
  }
  return escaped;
}

}  // namespace nisio::oracle
