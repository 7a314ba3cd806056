#include "nisio/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace nisio::fft {

namespace {

// FFTW planning is not thread safe; execution of an existing plan on new
// arrays is. Plans are created once per (dim, n, sign) and never destroyed.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::size_t total = dim == 1 ? std::size_t(n) : std::size_t(n) * n;
    auto* in = fftw_alloc_complex(total);
    auto* out = fftw_alloc_complex(total);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = dim == 1 ? fftw_plan_dft_1d(n, in, out, sign, flags)
                              : fftw_plan_dft_2d(n, n, in, out, sign, flags);
    fftw_free(in);
    fftw_free(out);
    if (plan == nullptr) throw std::runtime_error("fftw planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void execute(const TorusGrid& grid, const std::complex<double>* in, std::complex<double>* out,
             int sign) {
  fftw_plan plan = PlanCache::instance().get(grid.dim(), grid.n(), sign);
  // fftw_execute_dft does not modify the input for out-of-place complex plans.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void check_sizes(const TorusGrid& grid, std::size_t a, std::size_t b) {
  if (a != grid.size() || b != grid.size()) throw std::invalid_argument("fft: buffer size mismatch");
}

}  // namespace

void forward(const TorusGrid& grid, std::span<const double> in,
             std::span<std::complex<double>> out) {
  check_sizes(grid, in.size(), out.size());
  std::vector<std::complex<double>> buf(in.begin(), in.end());
  execute(grid, buf.data(), out.data(), FFTW_FORWARD);
}

void forward(const TorusGrid& grid, std::span<const std::complex<double>> in,
             std::span<std::complex<double>> out) {
  check_sizes(grid, in.size(), out.size());
  if (in.data() == out.data()) {
    std::vector<std::complex<double>> buf(in.begin(), in.end());
    execute(grid, buf.data(), out.data(), FFTW_FORWARD);
    return;
  }
  execute(grid, in.data(), out.data(), FFTW_FORWARD);
}

void backward(const TorusGrid& grid, std::span<const std::complex<double>> in,
              std::span<std::complex<double>> out) {
  check_sizes(grid, in.size(), out.size());
  if (in.data() == out.data()) {
    std::vector<std::complex<double>> buf(in.begin(), in.end());
    execute(grid, buf.data(), out.data(), FFTW_BACKWARD);
    return;
  }
  execute(grid, in.data(), out.data(), FFTW_BACKWARD);
}

void direct_dft(const TorusGrid& grid, std::span<const std::complex<double>> in,
                std::span<std::complex<double>> out, int sign) {
  check_sizes(grid, in.size(), out.size());
  const int n = grid.n();
  std::vector<std::complex<double>> twiddle(n);
  for (int j = 0; j < n; ++j) {
    double a = sign * 2.0 * std::numbers::pi * j / n;
    twiddle[j] = {std::cos(a), std::sin(a)};
  }
  auto dft_line = [&](const std::complex<double>* src, std::size_t stride,
                      std::complex<double>* dst) {
    for (int k = 0; k < n; ++k) {
      std::complex<double> acc{0.0, 0.0};
      for (int j = 0; j < n; ++j) acc += src[j * stride] * twiddle[(std::size_t(j) * k) % n];
      dst[k * stride] = acc;
    }
  };
  // `in` may alias `out`.
  std::vector<std::complex<double>> src(in.begin(), in.end());
  if (grid.dim() == 1) {
    dft_line(src.data(), 1, out.data());
    return;
  }
  std::vector<std::complex<double>> rows(grid.size());
  for (int i = 0; i < n; ++i) dft_line(src.data() + std::size_t(i) * n, 1, rows.data() + std::size_t(i) * n);
  for (int i = 0; i < n; ++i) dft_line(rows.data() + i, n, out.data() + i);
}

}  // namespace nisio::fft
