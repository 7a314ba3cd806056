#include "nisio/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "nisio/errors.hpp"
#include "nisio/fft.hpp"

namespace nisio::kernels {

namespace {

using cvec = std::vector<std::complex<double>>;

const int kDefaultThreads = omp_get_max_threads();

void transform(const TorusGrid& grid, std::span<const std::complex<double>> in,
               std::span<std::complex<double>> out, int sign, Execution exec) {
  if (exec == Execution::serial) {
    fft::direct_dft(grid, in, out, sign);
  } else if (sign < 0) {
    fft::forward(grid, in, out);
  } else {
    fft::backward(grid, in, out);
  }
}

cvec spectrum_of(const TorusGrid& grid, std::span<const double> in, Execution exec) {
  cvec buf(in.begin(), in.end());
  cvec out(grid.size());
  transform(grid, buf, out, -1, exec);
  return out;
}

// g = Re IDFT(m * F) / N into `out`; returns the max imaginary residue.
double evolve_member(const TorusGrid& grid, const Multiplier& m, const cvec& spectrum,
                     std::span<double> out, Execution exec) {
  const std::size_t size = grid.size();
  cvec buf(size);
  for (std::size_t k = 0; k < size; ++k) buf[k] = m[k] * spectrum[k];
  transform(grid, buf, buf, +1, exec);
  const double scale = 1.0 / double(size);
  double residue = 0.0;
  for (std::size_t j = 0; j < size; ++j) {
    out[j] = buf[j].real() * scale;
    residue = std::max(residue, std::abs(buf[j].imag()) * scale);
  }
  return residue;
}

void check_shapes(const TorusGrid& grid, std::size_t in, std::size_t out) {
  if (in != grid.size() || out != grid.size()) throw ConfigError("kernel buffer size mismatch");
}

}  // namespace

void set_max_threads(int n) { omp_set_num_threads(n > 0 ? n : kDefaultThreads); }

int max_threads() { return omp_get_max_threads(); }

double apply_multiplier(const TorusGrid& grid, const Multiplier& m, std::span<const double> in,
                        std::span<double> out, bool add_input, Execution exec) {
  check_shapes(grid, in.size(), out.size());
  if (m.size() != grid.size()) throw ConfigError("multiplier size mismatch");
  cvec spectrum = spectrum_of(grid, in, exec);
  std::vector<double> g(grid.size());
  double residue = evolve_member(grid, m, spectrum, g, exec);
  const auto size = std::ptrdiff_t(grid.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < size; ++j) out[j] = add_input ? in[j] + g[j] : g[j];
  } else {
    for (std::ptrdiff_t j = 0; j < size; ++j) out[j] = add_input ? in[j] + g[j] : g[j];
  }
  return residue;
}

double sup_step(const TorusGrid& grid, std::span<const Multiplier> ms, std::span<const double> in,
                std::span<double> out, std::span<int> argmax, Execution exec,
                std::vector<std::vector<double>>* member_out) {
  check_shapes(grid, in.size(), out.size());
  if (ms.empty()) throw ConfigError("sup_step needs at least one multiplier");
  if (!argmax.empty() && argmax.size() != grid.size()) throw ConfigError("argmax buffer size mismatch");
  const std::size_t size = grid.size();
  const auto members = std::ptrdiff_t(ms.size());
  cvec spectrum = spectrum_of(grid, in, exec);

  std::vector<std::vector<double>> g(ms.size(), std::vector<double>(size));
  std::vector<double> residues(ms.size(), 0.0);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t m = 0; m < members; ++m) residues[m] = evolve_member(grid, ms[m], spectrum, g[m], exec);
  } else {
    for (std::ptrdiff_t m = 0; m < members; ++m) residues[m] = evolve_member(grid, ms[m], spectrum, g[m], exec);
  }

  auto reduce_point = [&](std::size_t j) {
    double best = g[0][j];
    int arg = 0;
    for (std::size_t m = 1; m < g.size(); ++m) {
      if (g[m][j] > best) {
        best = g[m][j];
        arg = int(m);
      }
    }
    out[j] = in[j] + best;
    if (!argmax.empty()) argmax[j] = arg;
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < std::ptrdiff_t(size); ++j) reduce_point(std::size_t(j));
  } else {
    for (std::size_t j = 0; j < size; ++j) reduce_point(j);
  }

  if (member_out != nullptr) {
    member_out->assign(ms.size(), std::vector<double>(size));
    for (std::size_t m = 0; m < ms.size(); ++m)
      for (std::size_t j = 0; j < size; ++j) (*member_out)[m][j] = in[j] + g[m][j];
  }
  return *std::max_element(residues.begin(), residues.end());
}

}  // namespace nisio::kernels
