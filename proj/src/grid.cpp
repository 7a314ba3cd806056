#include "nisio/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nisio/errors.hpp"
#include "nisio/fft.hpp"
#include "nisio/io.hpp"

namespace nisio {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_grid(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid() == g.grid())) throw ConfigError("grid mismatch");
}

}  // namespace

double wrap_angle(double x) {
  if (x > -kPi && x <= kPi) return x;
  double r = std::fmod(x + kPi, kTwoPi);
  if (r <= 0.0) r += kTwoPi;
  return r - kPi;
}

Point wrap_point(const Point& p, int dim) {
  return {wrap_angle(p[0]), dim == 2 ? wrap_angle(p[1]) : 0.0};
}

TorusGrid::TorusGrid(int dim, int n) : dim_(dim), n_(n) {
  if (dim != 1 && dim != 2) throw ConfigError("grid dimension must be 1 or 2, got " + std::to_string(dim));
  if (n < 4 || n > (1 << 16)) throw ConfigError("grid size n must lie in [4, 65536], got " + std::to_string(n));
  if (n % 2 != 0) throw ConfigError("grid size n must be even, got " + std::to_string(n));
  spacing_ = kTwoPi / n;
  size_ = dim == 1 ? std::size_t(n) : std::size_t(n) * std::size_t(n);
}

TorusGrid make_grid(int dim, int n) { return TorusGrid(dim, n); }

std::array<int, 2> TorusGrid::axis_indices(std::size_t idx) const {
  if (dim_ == 1) return {int(idx), 0};
  return {int(idx / n_), int(idx % n_)};
}

Point TorusGrid::point(std::size_t idx) const {
  auto [i0, i1] = axis_indices(idx);
  return {coord(i0), dim_ == 2 ? coord(i1) : 0.0};
}

std::size_t TorusGrid::flat(int i0, int i1) const {
  auto wrap = [this](int i) { return ((i % n_) + n_) % n_; };
  if (dim_ == 1) return std::size_t(wrap(i0));
  return std::size_t(wrap(i0)) * n_ + std::size_t(wrap(i1));
}

std::array<int, 2> TorusGrid::modes(std::size_t idx) const {
  auto [s0, s1] = axis_indices(idx);
  return {mode_of_slot(s0), dim_ == 2 ? mode_of_slot(s1) : 0};
}

std::size_t TorusGrid::negated_slot(std::size_t idx) const {
  auto [s0, s1] = axis_indices(idx);
  return flat(n_ - s0, n_ - s1);
}

std::size_t TorusGrid::nearest(const Point& p) const {
  auto axis = [this](double x) {
    double u = (wrap_angle(x) + kPi) / spacing_;
    return int(std::lround(u)) % n_;
  };
  return dim_ == 1 ? flat(axis(p[0])) : flat(axis(p[0]), axis(p[1]));
}

double TorusGrid::snap_distance(const Point& p) const {
  Point q = point(nearest(p));
  double d0 = wrap_angle(p[0] - q[0]);
  double d1 = dim_ == 2 ? wrap_angle(p[1] - q[1]) : 0.0;
  return std::hypot(d0, d1);
}

GridFunction::GridFunction(TorusGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw ConfigError("grid function size does not match grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw ConfigError("grid function values must be finite");
}

GridFunction::GridFunction(TorusGrid grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool GridFunction::is_constant() const {
  return std::all_of(values_.begin(), values_.end(), [&](double v) { return v == values_.front(); });
}

std::complex<double> Spectrum::at(int k0, int k1) const {
  auto slot = [this](int k) { return ((k % grid.n()) + grid.n()) % grid.n(); };
  return coeffs[grid.flat(slot(k0), grid.dim() == 2 ? slot(k1) : 0)];
}

namespace {

// (-1)^(k0+k1): the grid origin sits at -pi, and mode parity equals slot parity for even n.
double origin_phase(const TorusGrid& grid, std::size_t idx) {
  auto [s0, s1] = grid.axis_indices(idx);
  return ((s0 + s1) % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

Spectrum forward_transform(const GridFunction& f) {
  const auto& grid = f.grid();
  Spectrum s{grid, std::vector<std::complex<double>>(grid.size())};
  fft::forward(grid, f.values(), s.coeffs);
  const double scale = 1.0 / double(grid.size());
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) s.coeffs[i] *= origin_phase(grid, i) * scale;
  return s;
}

GridFunction inverse_transform(const Spectrum& s) {
  const auto& grid = s.grid;
  if (s.coeffs.size() != grid.size()) throw ConfigError("spectrum size does not match grid");
  std::vector<std::complex<double>> buf(grid.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = s.coeffs[i] * origin_phase(grid, i);
  fft::backward(grid, buf, buf);
  std::vector<double> out(grid.size());
  double max_re = 0.0, max_im = 0.0;
  for (std::size_t i = 0; i < buf.size(); ++i) {
    out[i] = buf[i].real();
    max_re = std::max(max_re, std::abs(buf[i].real()));
    max_im = std::max(max_im, std::abs(buf[i].imag()));
  }
  if (max_im > 1e-10 * std::max(1.0, max_re))
    throw ConsistencyError("inverse transform: imaginary residue " + std::to_string(max_im) +
                           " (spectrum not conjugate symmetric)");
  return GridFunction(grid, std::move(out));
}

double sup_distance(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
  return m;
}

GridFunction pointwise_max(std::span<const GridFunction> fs) {
  if (fs.empty()) throw ConfigError("pointwise_max of an empty list");
  GridFunction out = fs.front();
  for (const auto& g : fs.subspan(1)) {
    require_same_grid(out, g);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], g[i]);
  }
  return out;
}

GridFunction cyclic_shift(const GridFunction& f, std::array<int, 2> offset) {
  const auto& grid = f.grid();
  GridFunction out(grid);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto [i0, i1] = grid.axis_indices(i);
    out[i] = f[grid.flat(i0 + offset[0], i1 + offset[1])];
  }
  return out;
}

double interpolate(const GridFunction& f, const Point& p) {
  const auto& grid = f.grid();
  const int n = grid.n();
  Spectrum s = forward_transform(f);
  std::vector<std::complex<double>> e0(n), e1(n, {1.0, 0.0});
  for (int slot = 0; slot < n; ++slot) {
    double k = grid.mode_of_slot(slot);
    e0[slot] = std::polar(1.0, k * p[0]);
    if (grid.dim() == 2) e1[slot] = std::polar(1.0, k * p[1]);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    auto [s0, s1] = grid.axis_indices(i);
    acc += (s.coeffs[i] * e0[s0] * e1[s1]).real();
  }
  return acc;
}

InitialFunction InitialFunction::cosine(std::array<int, 2> wave, double phase) {
  InitialFunction f;
  f.kind_ = "cosine";
  f.wave_ = wave;
  f.phase_ = phase;
  return f;
}

InitialFunction InitialFunction::bump(Point center, double width) {
  if (!(width > 0.0)) throw ConfigError("bump width must be positive");
  InitialFunction f;
  f.kind_ = "bump";
  f.center_ = center;
  f.width_ = width;
  return f;
}

InitialFunction InitialFunction::constant(double c) {
  if (!std::isfinite(c)) throw ConfigError("constant must be finite");
  InitialFunction f;
  f.kind_ = "constant";
  f.value_ = c;
  return f;
}

InitialFunction InitialFunction::samples(GridFunction g) {
  InitialFunction f;
  f.kind_ = "samples";
  f.raw_.push_back(std::move(g));
  return f;
}

InitialFunction InitialFunction::from_file(const std::string& path, const TorusGrid& grid) {
  return samples(io::read_grid_function_csv(path, grid));
}

double InitialFunction::evaluate(const Point& p) const {
  if (kind_ == "constant") return value_;
  if (kind_ == "cosine") return std::cos(wave_[0] * p[0] + wave_[1] * p[1] + phase_);
  if (kind_ == "bump") {
    double r = std::hypot(wrap_angle(p[0] - center_[0]), wrap_angle(p[1] - center_[1]));
    return r <= width_ ? 0.5 * (1.0 + std::cos(kPi * r / width_)) : 0.0;
  }
  return interpolate(raw_.front(), p);
}

GridFunction InitialFunction::sample(const TorusGrid& grid) const {
  if (kind_ == "samples") {
    if (!(raw_.front().grid() == grid)) throw ConfigError("sample file does not match the working grid");
    return raw_.front();
  }
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = evaluate(grid.point(i));
  return GridFunction(grid, std::move(v));
}

}  // namespace nisio
