#pragma once

#include <complex>
#include <span>

#include "nisio/grid.hpp"

// Unnormalized discrete Fourier transforms over the grid's flat index,
// slot order as in TorusGrid. No (-1)^k phase for the -pi origin is applied
// here; diagonal multipliers do not need it and forward_transform adds it.
namespace nisio::fft {

/// out_k = sum_j in_j exp(-2 pi i j.k / n)
void forward(const TorusGrid& grid, std::span<const double> in,
             std::span<std::complex<double>> out);
void forward(const TorusGrid& grid, std::span<const std::complex<double>> in,
             std::span<std::complex<double>> out);
/// out_j = sum_k in_k exp(+2 pi i j.k / n)
void backward(const TorusGrid& grid, std::span<const std::complex<double>> in,
              std::span<std::complex<double>> out);

/// Separable O(n^(d+1)) direct sums; same conventions as forward/backward.
/// sign = -1 for forward, +1 for backward.
void direct_dft(const TorusGrid& grid, std::span<const std::complex<double>> in,
                std::span<std::complex<double>> out, int sign);

}  // namespace nisio::fft
