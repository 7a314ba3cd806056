#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nisio/grid.hpp"

namespace nisio {

using Matrix2 = std::array<std::array<double, 2>, 2>;

struct Atom {
  Point at{0.0, 0.0};
  double weight = 0.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Torus Levy quadruple (b, Sigma, mu, nu). The generator is
///
///   A f = b.grad f + 1/2 tr(Sigma D^2 f) + int f(x+y) - f(x) dmu(y)
///         + int f(x+y) - f(x) - grad f(x).y dnu(y),
///
/// with y taken in its representative in (-pi, pi]^d. Both jump measures are
/// finite lists of weighted atoms.
struct LevyQuadruple {
  int dim = 1;
  Point drift{0.0, 0.0};
  Matrix2 sigma{};
  std::vector<Atom> mu;
  std::vector<Atom> nu;
  std::string label;

  /// Throws ConfigError on a non-symmetric or indefinite Sigma, non-positive
  /// weights, or a nu atom at the origin.
  void validate() const;

  double mu_mass() const;
  /// int |y|^2 dnu(y)
  double nu_second_moment() const;
  /// |Sigma| as the trace norm.
  double sigma_trace_norm() const;

  static LevyQuadruple zero(int dim = 1);
  /// One-dimensional Brownian motion with variance rate s^2.
  static LevyQuadruple diffusion(double s);
  static LevyQuadruple drift_only(double b);
  /// Compound Poisson process: uncompensated atoms.
  static LevyQuadruple compound_poisson(std::vector<Atom> atoms, int dim = 1);

  friend bool operator==(const LevyQuadruple&, const LevyQuadruple&) = default;
};

class GeneratorFamily {
 public:
  /// Throws ConfigError if empty, if dimensions disagree or if a member is invalid.
  explicit GeneratorFamily(std::vector<LevyQuadruple> members);

  int dim() const { return members_.front().dim; }
  std::size_t size() const { return members_.size(); }
  const LevyQuadruple& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<LevyQuadruple>& members() const { return members_; }

 private:
  std::vector<LevyQuadruple> members_;
};

/// sup over the family of |b| + |Sigma|_tr + mu(T^d) + int |y|^2 dnu.
double family_constant(const GeneratorFamily& fam);

/// Moves every mu atom to its nearest grid point; returns the largest move.
/// nu atoms are left where they are.
double snap_large_jumps(LevyQuadruple& q, const TorusGrid& grid);

/// Rate-`rate` compound Poisson process whose jumps are wrapped-Cauchy with
/// scale gamma (radians), discretized onto every grid point with weights
/// proportional to the sampled wrapped-Cauchy density. One-dimensional only.
LevyQuadruple wrapped_cauchy(const TorusGrid& grid, double gamma, double rate);

/// Characteristic exponent psi(k) per Fourier slot:
///
///   psi(k) = i<b,k> - 1/2 <k,Sigma k> + sum_j w_j (e^{i<k,y_j>} - 1)
///            + sum_j v_j (e^{i<k,z_j>} - 1 - i<k,z_j>),
///
/// symmetrized so that psi(-k) = conj(psi(k)) holds on the discrete mode set
/// (the Nyquist slots become real).
using Symbol = std::vector<std::complex<double>>;

/// Throws ConsistencyError naming the mode if psi(0) != 0 or Re psi > 1e-12.
Symbol levy_symbol(const LevyQuadruple& q, const TorusGrid& grid);

struct SymbolTable {
  TorusGrid grid;
  std::vector<Symbol> members;

  double max_abs() const;
};

SymbolTable build_symbols(const GeneratorFamily& fam, const TorusGrid& grid);

/// e^z - 1 without cancellation for small |z|.
std::complex<double> complex_expm1(std::complex<double> z);

/// S(t) f via the multiplier e^{t psi}. t = 0 and constant f return f
/// unchanged. Throws ConfigError for t < 0 and ConsistencyError on an
/// imaginary residue above 1e-10 or non-finite output.
GridFunction apply_linear(const Symbol& sym, double t, const GridFunction& f);

/// A f via the multiplier psi. Constant f gives exactly zero.
GridFunction generator_apply_single(const Symbol& sym, const GridFunction& f);

/// Smallest weight of the discrete transition kernel of S(t); negative values
/// measure how far the truncated multiplier is from a Markov kernel.
double kernel_floor(const Symbol& sym, const TorusGrid& grid, double t);

/// Explicit random stream. Per-path streams come from (seed, index) through
/// two rounds of splitmix64 feeding a 64-bit Mersenne twister.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);
  static RngStream for_path(std::uint64_t seed, std::uint64_t index);

  double gaussian() { return normal_(engine_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  std::uint64_t poisson(double mean);
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

/// Samples increments of the quadruple's Levy process over a time step.
class IncrementSampler {
 public:
  explicit IncrementSampler(const LevyQuadruple& q);

  /// b dt + sqrt(Sigma) N(0, dt) + mu jumps + nu jumps - dt sum v_j z_j,
  /// wrapped to (-pi, pi]^d.
  Point sample(double dt, RngStream& rng) const;

 private:
  struct JumpTable {
    std::vector<Point> atoms;
    std::vector<double> cumulative;  // normalized, last entry 1
    double rate = 0.0;
  };
  static JumpTable make_table(const std::vector<Atom>& atoms);
  static void add_jumps(const JumpTable& table, double dt, RngStream& rng, Point& x);

  int dim_;
  Point drift_;
  Matrix2 root_{};  // symmetric square root of Sigma
  bool has_diffusion_ = false;
  JumpTable large_;
  JumpTable small_;
  Point compensation_{0.0, 0.0};  // sum_j v_j z_j
};

Point sample_increment(const LevyQuadruple& q, double dt, RngStream& rng);

}  // namespace nisio
