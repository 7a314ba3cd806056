#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace nisio {

/// A point of R^d or T^d, d <= 2. The second coordinate is zero when d == 1.
using Point = std::array<double, 2>;

/// Wraps an angle into the torus representative (-pi, pi].
double wrap_angle(double x);
Point wrap_point(const Point& p, int dim);

/// Uniform periodic grid on T^d, d in {1, 2}, with n (even) points per axis
/// at x_j = -pi + j * 2pi/n.
///
/// Flat indices are row-major: idx = i0 * n + i1 in two dimensions. Fourier
/// mode slots use the usual FFT order, slot j holds mode j for j <= n/2 and
/// mode j - n otherwise, so modes run over {-n/2+1, ..., n/2}.
class TorusGrid {
 public:
  /// Throws ConfigError unless dim is 1 or 2 and n is even with 4 <= n <= 2^16.
  TorusGrid(int dim, int n);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return size_; }

  double coord(int j) const { return -std::numbers::pi + j * spacing_; }
  Point point(std::size_t idx) const;
  std::array<int, 2> axis_indices(std::size_t idx) const;
  std::size_t flat(int i0, int i1 = 0) const;

  static int mode_of_slot(int slot, int n) { return slot <= n / 2 ? slot : slot - n; }
  int mode_of_slot(int slot) const { return mode_of_slot(slot, n_); }
  /// Mode vector for a flat spectrum slot.
  std::array<int, 2> modes(std::size_t idx) const;
  /// Flat slot of the mode -k (k at the Nyquist frequency maps to itself).
  std::size_t negated_slot(std::size_t idx) const;

  /// Nearest grid point to p (torus distance) and that distance.
  std::size_t nearest(const Point& p) const;
  double snap_distance(const Point& p) const;

  friend bool operator==(const TorusGrid& a, const TorusGrid& b) {
    return a.dim_ == b.dim_ && a.n_ == b.n_;
  }

 private:
  int dim_;
  int n_;
  double spacing_;
  std::size_t size_;
};

TorusGrid make_grid(int dim, int n);

/// Samples of a bounded uniformly continuous function on the grid.
class GridFunction {
 public:
  GridFunction(TorusGrid grid, std::vector<double> values);
  explicit GridFunction(TorusGrid grid, double fill = 0.0);

  const TorusGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  double sup_norm() const;
  double min() const;
  double max() const;
  bool is_constant() const;

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

/// Fourier coefficients c_k of f(x) = sum_k c_k e^{i<k,x>}, stored in FFT
/// slot order.
struct Spectrum {
  TorusGrid grid;
  std::vector<std::complex<double>> coeffs;

  std::complex<double> at(int k0, int k1 = 0) const;
};

Spectrum forward_transform(const GridFunction& f);
/// Throws ConsistencyError if the result has an imaginary part above 1e-10
/// relative to its size, i.e. the spectrum was not conjugate symmetric.
GridFunction inverse_transform(const Spectrum& s);

double sup_distance(const GridFunction& f, const GridFunction& g);
GridFunction pointwise_max(std::span<const GridFunction> fs);
GridFunction cyclic_shift(const GridFunction& f, std::array<int, 2> offset);

/// Trigonometric interpolation of f at an arbitrary torus point.
double interpolate(const GridFunction& f, const Point& p);

/// Initial data: builtin closed forms (evaluated exactly anywhere) or raw
/// grid samples (evaluated off-grid by trigonometric interpolation).
class InitialFunction {
 public:
  static InitialFunction cosine(std::array<int, 2> wave, double phase = 0.0);
  /// Periodized raised cosine: (1 + cos(pi r / width)) / 2 for r <= width,
  /// r the torus distance to center. Throws ConfigError if width <= 0.
  static InitialFunction bump(Point center, double width);
  static InitialFunction constant(double c);
  static InitialFunction samples(GridFunction f);
  /// Reads a GridFunction CSV (see io.hpp) on the given grid.
  static InitialFunction from_file(const std::string& path, const TorusGrid& grid);

  GridFunction sample(const TorusGrid& grid) const;
  double evaluate(const Point& p) const;
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
  std::array<int, 2> wave_{0, 0};
  double phase_ = 0.0;
  Point center_{0.0, 0.0};
  double width_ = 0.0;
  double value_ = 0.0;
  std::vector<GridFunction> raw_;  // at most one element
};

}  // namespace nisio
