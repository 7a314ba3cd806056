#pragma once

#include <map>
#include <optional>
#include <vector>

#include "nisio/grid.hpp"
#include "nisio/kernels.hpp"
#include "nisio/levy.hpp"

namespace nisio {

/// Finite partition 0 = t_0 < t_1 < ... < t_m of [0, t_m].
class Partition {
 public:
  /// Throws ConfigError unless times start at 0 and increase strictly.
  explicit Partition(std::vector<double> times);
  static Partition dyadic(double t, int level);
  static Partition equidistant(double t, int steps);

  const std::vector<double>& times() const { return times_; }
  double end() const { return times_.back(); }
  std::size_t steps() const { return times_.size() - 1; }
  double step(std::size_t j) const { return times_[j + 1] - times_[j]; }
  /// Largest step, 0 for the trivial partition {0}.
  double mesh() const { return mesh_; }

 private:
  std::vector<double> times_;
  double mesh_ = 0.0;
};

/// A generator family placed on a working grid: large-jump atoms snapped to
/// grid points, symbols tabulated.
class DiscreteFamily {
 public:
  DiscreteFamily(const GeneratorFamily& fam, const TorusGrid& grid);

  const TorusGrid& grid() const { return grid_; }
  const GeneratorFamily& family() const { return family_; }
  const SymbolTable& symbols() const { return symbols_; }
  const Symbol& symbol(std::size_t i) const { return symbols_.members[i]; }
  std::size_t size() const { return family_.size(); }
  /// Largest distance a mu atom moved when snapped.
  double snap_distance() const { return snap_distance_; }

 private:
  TorusGrid grid_;
  GeneratorFamily family_;
  SymbolTable symbols_;
  double snap_distance_ = 0.0;
};

/// J_t with its per-member multipliers computed once; reused across the
/// 2^level identical steps of a dyadic iterate.
class SupStep {
 public:
  SupStep(const DiscreteFamily& fam, double t);

  double t() const { return t_; }
  /// argmax, if given, is resized to the grid and filled with the lowest
  /// maximizing member index per point.
  GridFunction apply(const GridFunction& f, std::vector<int>* argmax = nullptr,
                     kernels::Execution exec = kernels::Execution::parallel,
                     std::vector<std::vector<double>>* member_out = nullptr) const;

 private:
  double t_;
  std::vector<kernels::Multiplier> multipliers_;
};

/// Maximizing member per grid point for each partition interval, intervals
/// in time order (interval j is (t_j, t_{j+1}]).
struct ArgmaxField {
  std::vector<std::vector<int>> per_step;
};

struct JResult {
  GridFunction value;
  std::optional<std::vector<int>> argmax;
};

/// (J_t f)(x) = max over members of (S_lambda(t) f)(x); J_0 f = f.
JResult apply_J(const DiscreteFamily& fam, double t, const GridFunction& f, bool record_argmax = false);

/// J_pi f = J_{t_1 - t_0} ... J_{t_m - t_{m-1}} f (the last interval acts first).
GridFunction apply_partition(const DiscreteFamily& fam, const Partition& pi, const GridFunction& f,
                             ArgmaxField* record = nullptr);

/// (J_{t/2^level})^(2^level) f.
GridFunction dyadic_iterate(const DiscreteFamily& fam, double t, const GridFunction& f, int level,
                            ArgmaxField* record = nullptr);

/// (J_{t/n})^n f; identical to dyadic_iterate when n = 2^level.
GridFunction chernoff_equidistant(const DiscreteFamily& fam, double t, const GridFunction& f, int n);

struct LevelStats {
  int level = 0;
  std::size_t steps = 1;
  /// max_x (V_level - V_{level-1})(x); NaN at level 0.
  double sup_increment = 0.0;
  /// max_x (V_{level-1} - V_level)(x) clamped at 0; NaN at level 0.
  double monotonicity_defect = 0.0;
  double sup_norm = 0.0;
  double elapsed_ms = 0.0;
};

struct NisioResult {
  GridFunction value;
  double t = 0.0;
  int levels_used = 0;  // number of levels computed (finest level = levels_used - 1)
  bool converged = false;
  std::vector<LevelStats> levels;
  double lipschitz_bound = 0.0;
  double family_constant = 0.0;
  int argmax_level = -1;
  ArgmaxField argmax;  // of the finest level

  int finest_level() const { return levels_used - 1; }
  /// Increments of levels 1..finest.
  std::vector<double> increments() const;
};

/// Dyadic Nisio iteration: levels 0, 1, ... until the sup increment drops
/// below tol or max_level is reached (reported as not converged). A
/// one-member family or a constant f is exact at level 0.
///
/// Throws ConfigError unless t > 0, 0 <= max_level <= 20, tol >= 0, and
/// ConsistencyError if an increment falls below -1e-8.
NisioResult nisio_evolve(const DiscreteFamily& fam, double t, const GridFunction& f, int max_level = 12,
                         double tol = 1e-6, bool record_argmax = true);

/// Pointwise max over members of A_lambda f.
GridFunction generator_sup(const DiscreteFamily& fam, const GridFunction& f);

/// L_f = max over members of ||A_lambda f||_inf.
double lipschitz_bound(const DiscreteFamily& fam, const GridFunction& f);

/// ||S(s+t) f - S(s) S(t) f||_inf with every evolution at the same dyadic level.
double dpp_check(const DiscreteFamily& fam, double s, double t, const GridFunction& f, int level);

struct GeneratorLimitRow {
  double h = 0.0;
  int level = 0;
  double error = 0.0;  // ||(S(h) f - f)/h - sup_lambda A_lambda f||_inf
};

/// h_list must be positive and decreasing. S(h) is taken at dyadic level
/// max(8, ceil(log2(h_list[0]/h)) + 4).
std::vector<GeneratorLimitRow> generator_limit_table(const DiscreteFamily& fam, const GridFunction& f,
                                                     const std::vector<double>& h_list);

/// Largest ||J_pi f - J_pi' f|| over partitions pi' obtained by moving one
/// time t_j (j >= 1) by +-eps. eps must be below half the smallest gap.
double partition_continuity_probe(const DiscreteFamily& fam, const Partition& pi, const GridFunction& f,
                                  double eps);

}  // namespace nisio
