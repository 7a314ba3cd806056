#include "nisio/semigroup.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "nisio/errors.hpp"

namespace nisio {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

GeneratorFamily snapped(const GeneratorFamily& fam, const TorusGrid& grid, double& worst) {
  std::vector<LevyQuadruple> members = fam.members();
  worst = 0.0;
  for (auto& q : members) worst = std::max(worst, snap_large_jumps(q, grid));
  return GeneratorFamily(std::move(members));
}

void require_grid(const DiscreteFamily& fam, const GridFunction& f) {
  if (!(fam.grid() == f.grid())) throw ConfigError("function grid does not match the family's grid");
}

}  // namespace

Partition::Partition(std::vector<double> times) : times_(std::move(times)) {
  if (times_.empty() || times_.front() != 0.0) throw ConfigError("partition must start at 0");
  for (std::size_t j = 1; j < times_.size(); ++j) {
    if (!(times_[j] > times_[j - 1]) || !std::isfinite(times_[j]))
      throw ConfigError("partition times must increase strictly");
    mesh_ = std::max(mesh_, times_[j] - times_[j - 1]);
  }
}

Partition Partition::dyadic(double t, int level) {
  if (level < 0 || level > 30) throw ConfigError("dyadic level out of range");
  return equidistant(t, 1 << level);
}

Partition Partition::equidistant(double t, int steps) {
  if (!(t > 0.0) || steps < 1) throw ConfigError("equidistant partition needs t > 0 and steps >= 1");
  std::vector<double> times(std::size_t(steps) + 1);
  for (int j = 0; j <= steps; ++j) times[j] = t * (double(j) / steps);
  times.back() = t;
  return Partition(std::move(times));
}

DiscreteFamily::DiscreteFamily(const GeneratorFamily& fam, const TorusGrid& grid)
    : grid_(grid), family_(snapped(fam, grid, snap_distance_)), symbols_(build_symbols(family_, grid)) {}

SupStep::SupStep(const DiscreteFamily& fam, double t) : t_(t) {
  if (!(t >= 0.0)) throw ConfigError("J_t needs t >= 0");
  multipliers_.reserve(fam.size());
  for (std::size_t m = 0; m < fam.size(); ++m) {
    const auto& sym = fam.symbol(m);
    kernels::Multiplier mult(sym.size());
    for (std::size_t k = 0; k < sym.size(); ++k) mult[k] = complex_expm1(t * sym[k]);
    multipliers_.push_back(std::move(mult));
  }
}

GridFunction SupStep::apply(const GridFunction& f, std::vector<int>* argmax, kernels::Execution exec,
                            std::vector<std::vector<double>>* member_out) const {
  if (multipliers_.front().size() != f.size()) throw ConfigError("J_t: function grid does not match");
  // J_0 = id, and every member preserves constants.
  if (t_ == 0.0 || f.is_constant()) {
    if (argmax != nullptr) argmax->assign(f.size(), 0);
    if (member_out != nullptr) {
      member_out->assign(multipliers_.size(), std::vector<double>(f.values().begin(), f.values().end()));
    }
    return f;
  }
  GridFunction out(f.grid());
  std::span<int> arg;
  if (argmax != nullptr) {
    argmax->resize(f.size());
    arg = *argmax;
  }
  double residue = kernels::sup_step(f.grid(), multipliers_, f.values(), out.values(), arg, exec, member_out);
  if (residue > 1e-10 * (1.0 + f.sup_norm()))
    throw ConsistencyError("J_t: imaginary residue " + std::to_string(residue) + " exceeds tolerance");
  for (double v : out.values())
    if (!std::isfinite(v)) throw ConsistencyError("J_t: non-finite output");
  return out;
}

JResult apply_J(const DiscreteFamily& fam, double t, const GridFunction& f, bool record_argmax) {
  require_grid(fam, f);
  SupStep step(fam, t);
  if (!record_argmax) return {step.apply(f), std::nullopt};
  std::vector<int> arg;
  GridFunction v = step.apply(f, &arg);
  return {std::move(v), std::move(arg)};
}

GridFunction apply_partition(const DiscreteFamily& fam, const Partition& pi, const GridFunction& f,
                             ArgmaxField* record) {
  require_grid(fam, f);
  const std::size_t m = pi.steps();
  if (record != nullptr) record->per_step.assign(m, {});
  std::map<double, SupStep> steps;
  GridFunction v = f;
  for (std::size_t j = m; j-- > 0;) {
    double dt = pi.step(j);
    auto it = steps.find(dt);
    if (it == steps.end()) it = steps.emplace(dt, SupStep(fam, dt)).first;
    v = it->second.apply(v, record != nullptr ? &record->per_step[j] : nullptr);
  }
  return v;
}

namespace {

GridFunction repeat_step(const DiscreteFamily& fam, double t, const GridFunction& f, std::size_t n,
                         ArgmaxField* record) {
  require_grid(fam, f);
  if (!(t > 0.0)) throw ConfigError("iterated J needs t > 0");
  SupStep step(fam, t / double(n));
  if (record != nullptr) record->per_step.assign(n, {});
  GridFunction v = f;
  for (std::size_t s = 0; s < n; ++s) {
    // Step s acts on the value-to-go of the last s intervals, i.e. interval n-1-s.
    v = step.apply(v, record != nullptr ? &record->per_step[n - 1 - s] : nullptr);
  }
  return v;
}

}  // namespace

GridFunction dyadic_iterate(const DiscreteFamily& fam, double t, const GridFunction& f, int level,
                            ArgmaxField* record) {
  if (level < 0 || level > 30) throw ConfigError("dyadic level out of range");
  return repeat_step(fam, t, f, std::size_t(1) << level, record);
}

GridFunction chernoff_equidistant(const DiscreteFamily& fam, double t, const GridFunction& f, int n) {
  if (n < 1) throw ConfigError("chernoff_equidistant needs n >= 1");
  return repeat_step(fam, t, f, std::size_t(n), nullptr);
}

std::vector<double> NisioResult::increments() const {
  std::vector<double> out;
  for (const auto& l : levels)
    if (l.level > 0) out.push_back(l.sup_increment);
  return out;
}

NisioResult nisio_evolve(const DiscreteFamily& fam, double t, const GridFunction& f, int max_level, double tol,
                         bool record_argmax) {
  require_grid(fam, f);
  if (!(t > 0.0)) throw ConfigError("nisio_evolve needs t > 0");
  if (max_level < 0 || max_level > 20) throw ConfigError("nisio_evolve needs 0 <= max_level <= 20");
  if (!(tol >= 0.0)) throw ConfigError("nisio_evolve needs tol >= 0");
  using clock = std::chrono::steady_clock;

  NisioResult result{f, t, 0, false, {}, 0.0, 0.0, -1, {}};
  result.lipschitz_bound = lipschitz_bound(fam, f);
  result.family_constant = family_constant(fam.family());
  const bool exact_at_zero = fam.size() == 1 || f.is_constant();

  std::optional<GridFunction> previous;
  for (int level = 0; level <= max_level; ++level) {
    auto start = clock::now();
    ArgmaxField field;
    GridFunction v = dyadic_iterate(fam, t, f, level, record_argmax ? &field : nullptr);
    LevelStats stats;
    stats.level = level;
    stats.steps = std::size_t(1) << level;
    stats.sup_norm = v.sup_norm();
    stats.sup_increment = kNaN;
    stats.monotonicity_defect = kNaN;
    if (previous) {
      double up = -std::numeric_limits<double>::infinity();
      double down = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        up = std::max(up, v[i] - (*previous)[i]);
        down = std::max(down, (*previous)[i] - v[i]);
      }
      stats.sup_increment = up;
      stats.monotonicity_defect = down;
    }
    stats.elapsed_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    result.levels.push_back(stats);
    result.value = v;
    result.levels_used = level + 1;
    if (record_argmax) {
      result.argmax = std::move(field);
      result.argmax_level = level;
    }
    if (previous && stats.sup_increment < -1e-8) {
      std::ostringstream msg;
      msg << "dyadic iterates decreased at level " << level << " (sup increment " << stats.sup_increment
          << "); the linear semigroups are not consistent";
      throw ConsistencyError(msg.str());
    }
    if (exact_at_zero || (previous && stats.sup_increment < tol)) {
      result.converged = true;
      break;
    }
    previous = std::move(v);
  }
  return result;
}

GridFunction generator_sup(const DiscreteFamily& fam, const GridFunction& f) {
  require_grid(fam, f);
  GridFunction out = generator_apply_single(fam.symbol(0), f);
  for (std::size_t m = 1; m < fam.size(); ++m) {
    GridFunction g = generator_apply_single(fam.symbol(m), f);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], g[i]);
  }
  return out;
}

double lipschitz_bound(const DiscreteFamily& fam, const GridFunction& f) {
  require_grid(fam, f);
  double l = 0.0;
  for (std::size_t m = 0; m < fam.size(); ++m) l = std::max(l, generator_apply_single(fam.symbol(m), f).sup_norm());
  return l;
}

double dpp_check(const DiscreteFamily& fam, double s, double t, const GridFunction& f, int level) {
  if (!(s > 0.0) || !(t > 0.0)) throw ConfigError("dpp_check needs s > 0 and t > 0");
  GridFunction whole = dyadic_iterate(fam, s + t, f, level);
  GridFunction split = dyadic_iterate(fam, s, dyadic_iterate(fam, t, f, level), level);
  return sup_distance(whole, split);
}

std::vector<GeneratorLimitRow> generator_limit_table(const DiscreteFamily& fam, const GridFunction& f,
                                                     const std::vector<double>& h_list) {
  if (h_list.empty()) throw ConfigError("generator_limit_table needs at least one h");
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    if (!(h_list[i] > 0.0)) throw ConfigError("generator_limit_table: h must be positive");
    if (i > 0 && !(h_list[i] < h_list[i - 1])) throw ConfigError("generator_limit_table: h_list must decrease");
  }
  const GridFunction target = generator_sup(fam, f);
  std::vector<GeneratorLimitRow> rows;
  for (double h : h_list) {
    int level = std::max(8, int(std::ceil(std::log2(h_list.front() / h))) + 4);
    GridFunction sh = dyadic_iterate(fam, h, f, level);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs((sh[i] - f[i]) / h - target[i]));
    rows.push_back({h, level, err});
  }
  return rows;
}

double partition_continuity_probe(const DiscreteFamily& fam, const Partition& pi, const GridFunction& f,
                                  double eps) {
  if (!(eps >= 0.0)) throw ConfigError("partition probe needs eps >= 0");
  if (eps == 0.0 || pi.steps() == 0) return 0.0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < pi.steps(); ++j) min_gap = std::min(min_gap, pi.step(j));
  if (!(eps < 0.5 * min_gap)) throw ConfigError("partition probe: eps must be below half the smallest gap");
  const GridFunction base = apply_partition(fam, pi, f);
  double worst = 0.0;
  for (std::size_t j = 1; j < pi.times().size(); ++j) {
    for (double sign : {-1.0, 1.0}) {
      std::vector<double> times = pi.times();
      times[j] += sign * eps;
      worst = std::max(worst, sup_distance(base, apply_partition(fam, Partition(std::move(times)), f)));
    }
  }
  return worst;
}

}  // namespace nisio
