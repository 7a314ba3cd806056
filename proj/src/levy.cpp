#include "nisio/levy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nisio/errors.hpp"
#include "nisio/kernels.hpp"

namespace nisio {

namespace {

bool finite(const Point& p) { return std::isfinite(p[0]) && std::isfinite(p[1]); }

double norm(const Point& p) { return std::hypot(p[0], p[1]); }

// Eigenvalues of the symmetric part of a 2x2 matrix.
std::array<double, 2> sym_eigenvalues(const Matrix2& s) {
  double a = s[0][0], c = s[1][1], b = 0.5 * (s[0][1] + s[1][0]);
  double mean = 0.5 * (a + c);
  double r = std::hypot(0.5 * (a - c), b);
  return {mean - r, mean + r};
}

// sin(x) - x, accurate near zero.
double sin_minus_x(double x) {
  if (std::abs(x) < 0.1) {
    double x2 = x * x;
    return -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0))));
  }
  return std::sin(x) - x;
}

// cos(x) - 1 without cancellation.
double cos_minus_1(double x) {
  double s = std::sin(0.5 * x);
  return -2.0 * s * s;
}

void check_residue(double residue, double scale, const char* what) {
  if (residue > 1e-10 * (1.0 + scale)) {
    std::ostringstream msg;
    msg << what << ": imaginary residue " << residue << " exceeds tolerance";
    throw ConsistencyError(msg.str());
  }
}

void check_finite(const GridFunction& f, const char* what) {
  for (double v : f.values())
    if (!std::isfinite(v)) throw ConsistencyError(std::string(what) + ": non-finite output");
}

}  // namespace

void LevyQuadruple::validate() const {
  if (dim != 1 && dim != 2) throw ConfigError("quadruple dimension must be 1 or 2");
  if (!finite(drift)) throw ConfigError("drift must be finite");
  for (const auto& row : sigma)
    for (double v : row)
      if (!std::isfinite(v)) throw ConfigError("Sigma must be finite");
  if (dim == 1 && (drift[1] != 0.0 || sigma[0][1] != 0.0 || sigma[1][0] != 0.0 || sigma[1][1] != 0.0))
    throw ConfigError("one-dimensional quadruple has entries beyond the first coordinate");
  if (std::abs(sigma[0][1] - sigma[1][0]) > 1e-12) throw ConfigError("Sigma must be symmetric");
  if (sym_eigenvalues(sigma)[0] < -1e-12) throw ConfigError("Sigma must be positive semidefinite");
  auto check_atoms = [this](const std::vector<Atom>& atoms, const char* name, bool forbid_origin) {
    for (const auto& a : atoms) {
      if (!finite(a.at)) throw ConfigError(std::string(name) + " atom location must be finite");
      if (dim == 1 && a.at[1] != 0.0) throw ConfigError(std::string(name) + " atom has a second coordinate in 1-d");
      if (!(a.weight > 0.0) || !std::isfinite(a.weight))
        throw ConfigError(std::string(name) + " atom weights must be positive and finite");
      if (forbid_origin && norm(wrap_point(a.at, dim)) == 0.0)
        throw ConfigError(std::string(name) + " atoms must not sit at the origin");
    }
  };
  check_atoms(mu, "mu", false);
  check_atoms(nu, "nu", true);
}

double LevyQuadruple::mu_mass() const {
  double m = 0.0;
  for (const auto& a : mu) m += a.weight;
  return m;
}

double LevyQuadruple::nu_second_moment() const {
  double m = 0.0;
  for (const auto& a : nu) {
    double r = norm(wrap_point(a.at, dim));
    m += a.weight * r * r;
  }
  return m;
}

double LevyQuadruple::sigma_trace_norm() const {
  auto ev = sym_eigenvalues(sigma);
  return std::abs(ev[0]) + std::abs(ev[1]);
}

LevyQuadruple LevyQuadruple::zero(int dim) {
  LevyQuadruple q;
  q.dim = dim;
  q.label = "zero";
  return q;
}

LevyQuadruple LevyQuadruple::diffusion(double s) {
  LevyQuadruple q;
  q.sigma[0][0] = s * s;
  std::ostringstream label;
  label << "diffusion(sigma=" << s << ")";
  q.label = label.str();
  return q;
}

LevyQuadruple LevyQuadruple::drift_only(double b) {
  LevyQuadruple q;
  q.drift[0] = b;
  q.label = "drift";
  return q;
}

LevyQuadruple LevyQuadruple::compound_poisson(std::vector<Atom> atoms, int dim) {
  LevyQuadruple q;
  q.dim = dim;
  q.mu = std::move(atoms);
  q.label = "compound-poisson";
  return q;
}

GeneratorFamily::GeneratorFamily(std::vector<LevyQuadruple> members) : members_(std::move(members)) {
  if (members_.empty()) throw ConfigError("generator family must not be empty");
  for (const auto& q : members_) {
    q.validate();
    if (q.dim != members_.front().dim) throw ConfigError("family members disagree on dimension");
  }
}

double family_constant(const GeneratorFamily& fam) {
  double c = 0.0;
  for (const auto& q : fam.members())
    c = std::max(c, norm(q.drift) + q.sigma_trace_norm() + q.mu_mass() + q.nu_second_moment());
  return c;
}

double snap_large_jumps(LevyQuadruple& q, const TorusGrid& grid) {
  if (q.dim != grid.dim()) throw ConfigError("quadruple and grid dimensions differ");
  double worst = 0.0;
  for (auto& a : q.mu) {
    worst = std::max(worst, grid.snap_distance(a.at));
    a.at = grid.point(grid.nearest(a.at));
  }
  return worst;
}

LevyQuadruple wrapped_cauchy(const TorusGrid& grid, double gamma, double rate) {
  if (grid.dim() != 1) throw ConfigError("wrapped Cauchy discretizer is one-dimensional");
  if (!(gamma > 0.0) || !(rate > 0.0)) throw ConfigError("wrapped Cauchy needs gamma > 0 and rate > 0");
  const double rho = std::exp(-gamma);
  std::vector<Atom> atoms(grid.size());
  double total = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double x = grid.coord(int(j));
    // Poisson kernel; the common factor (1 - rho^2)/(2 pi) cancels on normalization.
    double density = 1.0 / (1.0 - 2.0 * rho * std::cos(x) + rho * rho);
    atoms[j] = {{x, 0.0}, density};
    total += density;
  }
  for (auto& a : atoms) a.weight *= rate / total;
  std::erase_if(atoms, [](const Atom& a) { return !(a.weight > 0.0); });
  LevyQuadruple q = LevyQuadruple::compound_poisson(std::move(atoms));
  std::ostringstream label;
  label << "wrapped-cauchy(gamma=" << gamma << ",rate=" << rate << ")";
  q.label = label.str();
  return q;
}

Symbol levy_symbol(const LevyQuadruple& q, const TorusGrid& grid) {
  if (q.dim != grid.dim()) throw ConfigError("quadruple and grid dimensions differ");
  const double s01 = 0.5 * (q.sigma[0][1] + q.sigma[1][0]);
  std::vector<Point> small(q.nu.size());
  for (std::size_t j = 0; j < q.nu.size(); ++j) small[j] = wrap_point(q.nu[j].at, q.dim);

  Symbol psi(grid.size());
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    auto [k0i, k1i] = grid.modes(idx);
    const double k0 = k0i, k1 = k1i;
    double re = -0.5 * (k0 * k0 * q.sigma[0][0] + 2.0 * k0 * k1 * s01 + k1 * k1 * q.sigma[1][1]);
    double im = k0 * q.drift[0] + k1 * q.drift[1];
    for (const auto& a : q.mu) {
      double theta = k0 * a.at[0] + k1 * a.at[1];
      re += a.weight * cos_minus_1(theta);
      im += a.weight * std::sin(theta);
    }
    for (std::size_t j = 0; j < q.nu.size(); ++j) {
      double theta = k0 * small[j][0] + k1 * small[j][1];
      re += q.nu[j].weight * cos_minus_1(theta);
      im += q.nu[j].weight * sin_minus_x(theta);
    }
    psi[idx] = {re, im};
  }

  Symbol sym(grid.size());
  for (std::size_t idx = 0; idx < grid.size(); ++idx)
    sym[idx] = 0.5 * (psi[idx] + std::conj(psi[grid.negated_slot(idx)]));

  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    bool bad = (idx == 0 && sym[idx] != std::complex<double>(0.0, 0.0)) || sym[idx].real() > 1e-12 ||
               !std::isfinite(sym[idx].real()) || !std::isfinite(sym[idx].imag());
    if (bad) {
      auto [k0, k1] = grid.modes(idx);
      std::ostringstream msg;
      msg << "symbol of '" << q.label << "' violates its invariants at mode (" << k0;
      if (grid.dim() == 2) msg << ", " << k1;
      msg << "): psi = " << sym[idx].real() << " + " << sym[idx].imag() << "i";
      throw ConsistencyError(msg.str());
    }
  }
  return sym;
}

double SymbolTable::max_abs() const {
  double m = 0.0;
  for (const auto& s : members)
    for (const auto& v : s) m = std::max(m, std::abs(v));
  return m;
}

SymbolTable build_symbols(const GeneratorFamily& fam, const TorusGrid& grid) {
  SymbolTable table{grid, {}};
  table.members.reserve(fam.size());
  for (const auto& q : fam.members()) table.members.push_back(levy_symbol(q, grid));
  return table;
}

std::complex<double> complex_expm1(std::complex<double> z) {
  double em1 = std::expm1(z.real());
  double re = em1 * std::cos(z.imag()) + cos_minus_1(z.imag());
  double im = (em1 + 1.0) * std::sin(z.imag());
  return {re, im};
}

GridFunction apply_linear(const Symbol& sym, double t, const GridFunction& f) {
  if (!(t >= 0.0)) throw ConfigError("apply_linear: time must be nonnegative");
  if (sym.size() != f.size()) throw ConfigError("apply_linear: symbol does not match grid");
  if (t == 0.0 || f.is_constant()) return f;
  kernels::Multiplier m(sym.size());
  for (std::size_t k = 0; k < sym.size(); ++k) m[k] = complex_expm1(t * sym[k]);
  GridFunction out(f.grid());
  double residue = kernels::apply_multiplier(f.grid(), m, f.values(), out.values(), true);
  check_residue(residue, f.sup_norm(), "apply_linear");
  check_finite(out, "apply_linear");
  return out;
}

GridFunction generator_apply_single(const Symbol& sym, const GridFunction& f) {
  if (sym.size() != f.size()) throw ConfigError("generator_apply_single: symbol does not match grid");
  if (f.is_constant()) return GridFunction(f.grid(), 0.0);
  GridFunction out(f.grid());
  double residue = kernels::apply_multiplier(f.grid(), sym, f.values(), out.values(), false);
  check_residue(residue, out.sup_norm(), "generator_apply_single");
  check_finite(out, "generator_apply_single");
  return out;
}

double kernel_floor(const Symbol& sym, const TorusGrid& grid, double t) {
  GridFunction delta(grid, 0.0);
  delta[0] = 1.0;
  return apply_linear(sym, t, delta).min();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

RngStream RngStream::for_path(std::uint64_t seed, std::uint64_t index) {
  return RngStream(seed ^ splitmix64(index));
}

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  return std::poisson_distribution<std::uint64_t>(mean)(engine_);
}

IncrementSampler::JumpTable IncrementSampler::make_table(const std::vector<Atom>& atoms) {
  JumpTable table;
  double acc = 0.0;
  for (const auto& a : atoms) {
    acc += a.weight;
    table.atoms.push_back(a.at);
    table.cumulative.push_back(acc);
  }
  table.rate = acc;
  for (double& c : table.cumulative) c /= acc;
  if (!table.cumulative.empty()) table.cumulative.back() = 1.0;
  return table;
}

IncrementSampler::IncrementSampler(const LevyQuadruple& q) : dim_(q.dim), drift_(q.drift) {
  q.validate();
  // Closed-form square root of a 2x2 PSD matrix: (S + sqrt(det) I) / sqrt(tr + 2 sqrt(det)).
  const double a = std::max(0.0, q.sigma[0][0]);
  const double c = q.dim == 2 ? std::max(0.0, q.sigma[1][1]) : 0.0;
  const double b = q.dim == 2 ? 0.5 * (q.sigma[0][1] + q.sigma[1][0]) : 0.0;
  const double sdet = std::sqrt(std::max(0.0, a * c - b * b));
  const double denom = std::sqrt(a + c + 2.0 * sdet);
  if (denom > 0.0) {
    root_ = {{{(a + sdet) / denom, b / denom}, {b / denom, (c + sdet) / denom}}};
    has_diffusion_ = true;
  }
  large_ = make_table(q.mu);
  std::vector<Atom> small = q.nu;
  for (auto& s : small) s.at = wrap_point(s.at, q.dim);
  small_ = make_table(small);
  for (const auto& s : small) {
    compensation_[0] += s.weight * s.at[0];
    compensation_[1] += s.weight * s.at[1];
  }
}

void IncrementSampler::add_jumps(const JumpTable& table, double dt, RngStream& rng, Point& x) {
  if (table.rate <= 0.0) return;
  const std::uint64_t count = rng.poisson(table.rate * dt);
  for (std::uint64_t i = 0; i < count; ++i) {
    double u = rng.uniform();
    auto it = std::upper_bound(table.cumulative.begin(), table.cumulative.end(), u);
    std::size_t j = std::min<std::size_t>(it - table.cumulative.begin(), table.atoms.size() - 1);
    x[0] += table.atoms[j][0];
    x[1] += table.atoms[j][1];
  }
}

Point IncrementSampler::sample(double dt, RngStream& rng) const {
  if (!(dt > 0.0)) throw ConfigError("sample_increment: dt must be positive");
  Point x{drift_[0] * dt, drift_[1] * dt};
  if (has_diffusion_) {
    const double sdt = std::sqrt(dt);
    const double g0 = rng.gaussian() * sdt;
    const double g1 = dim_ == 2 ? rng.gaussian() * sdt : 0.0;
    x[0] += root_[0][0] * g0 + root_[0][1] * g1;
    x[1] += root_[1][0] * g0 + root_[1][1] * g1;
  }
  add_jumps(large_, dt, rng, x);
  add_jumps(small_, dt, rng, x);
  x[0] -= dt * compensation_[0];
  x[1] -= dt * compensation_[1];
  return wrap_point(x, dim_);
}

Point sample_increment(const LevyQuadruple& q, double dt, RngStream& rng) {
  return IncrementSampler(q).sample(dt, rng);
}

}  // namespace nisio
