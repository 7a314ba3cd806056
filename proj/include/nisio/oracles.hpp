#pragma once

#include <vector>

#include "nisio/grid.hpp"
#include "nisio/levy.hpp"
#include "nisio/semigroup.hpp"

// Ground truth that shares no code path with the dyadic J composition.
namespace nisio::oracle {

/// Smallest N with P(Poisson(mean) > N) <= tail_tol by the Chernoff bound
/// e^{-mean} (e mean / (N+1))^{N+1}. Throws BudgetError above 10^4.
int poisson_truncation(double mean, double tail_tol);

/// E f(x + J_t) for the compound Poisson process with jump rate
/// rate * sum(w) and jump law w_j / sum(w) on grid-point atoms, summed as
/// e^{-m} sum_{n<=N} m^n/n! Q^n f with Q the grid convolution, m the mean
/// jump count. Throws ConfigError if an atom is off the grid.
GridFunction poisson_series_apply(const TorusGrid& grid, double rate, const std::vector<Atom>& atoms, double t,
                                  const GridFunction& f, double tail_tol = 1e-10);

struct Trajectory {
  std::vector<double> times;
  std::vector<GridFunction> snapshots;
};

/// Largest RK4 step accepted by picard_solve: 2.5 / max |psi|.
double rk4_step_limit(const DiscreteFamily& fam);

/// Classical RK4 on u' = sup_lambda A_lambda u, u(0) = f, with the largest
/// step <= dt that divides t. Throws ConfigError above rk4_step_limit.
Trajectory picard_solve(const DiscreteFamily& fam, const GridFunction& f, double t, double dt);

struct ResidualReport {
  double delta = 0.0;
  std::vector<double> times;
  std::vector<double> sup_residual;
  /// Sup over points whose maximizing generator is the same at t - delta,
  /// t and t + delta.
  std::vector<double> smooth_sup_residual;
  std::vector<GridFunction> pointwise;
  std::vector<std::size_t> kink_points;  // per time, count of excluded points
};

/// r(t) = ||(u(t+delta) - u(t-delta)) / (2 delta) - sup_lambda A_lambda u(t)||_inf
/// with delta = stride * snapshot spacing. Needs uniformly spaced snapshots.
ResidualReport residual_check(const Trajectory& traj, const DiscreteFamily& fam, int stride = 1);

/// Escaped mass of the plateau 1{|x|_inf <= w}: max over members of
/// 1 - min_{|x|_inf <= w/2} S_lambda(t) plateau, clamped at 0. Needs 0 < w < pi.
double mass_diagnostic(const DiscreteFamily& fam, double t, double window_halfwidth);

}  // namespace nisio::oracle
