#pragma once

#include <complex>
#include <span>
#include <vector>

#include "nisio/grid.hpp"

// Data-parallel inner loops. Every kernel has an OpenMP path built on FFTW
// and a serial reference path built on direct DFT sums; tests check that the
// two agree and the benchmark compares their speed.
namespace nisio::kernels {

enum class Execution { parallel, serial };

/// Diagonal Fourier multiplier over grid slots.
using Multiplier = std::vector<std::complex<double>>;

/// out = [in +] Re IDFT(m * DFT(in)) / N. Returns the largest discarded
/// imaginary part.
double apply_multiplier(const TorusGrid& grid, const Multiplier& m, std::span<const double> in,
                        std::span<double> out, bool add_input, Execution exec = Execution::parallel);

/// One sup step: out = in + max_j Re IDFT(m_j * DFT(in)) / N.
///
/// With m_j = expm1(t psi_j) this is J_t. argmax (if non-empty) receives the
/// lowest maximizing index per point; member_out (if non-null) receives each
/// member's evolution in + g_j. Returns the largest discarded imaginary part.
double sup_step(const TorusGrid& grid, std::span<const Multiplier> ms, std::span<const double> in,
                std::span<double> out, std::span<int> argmax, Execution exec = Execution::parallel,
                std::vector<std::vector<double>>* member_out = nullptr);

/// Caps the thread count of parallel kernels (<= 0 restores the default).
void set_max_threads(int n);
int max_threads();

}  // namespace nisio::kernels
