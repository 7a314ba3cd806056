#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "nisio/grid.hpp"
#include "nisio/levy.hpp"
#include "nisio/semigroup.hpp"

namespace fixtures {

using namespace nisio;
inline constexpr double pi = std::numbers::pi;

inline GeneratorFamily two_sigma() {
  return GeneratorFamily({LevyQuadruple::diffusion(0.5), LevyQuadruple::diffusion(1.0)});
}

inline GeneratorFamily singleton_sigma(double s) { return GeneratorFamily({LevyQuadruple::diffusion(s)}); }

/// Two compound Poisson members with atoms on grid points of an n-grid;
/// exactly Markov on the grid.
inline GeneratorFamily cp_pair(int n) {
  const double h = 2.0 * pi / n;
  return GeneratorFamily({LevyQuadruple::compound_poisson({{{4 * h, 0.0}, 2.0}, {{-4 * h, 0.0}, 2.0}}),
                          LevyQuadruple::compound_poisson({{{8 * h, 0.0}, 1.5}, {{-2 * h, 0.0}, 0.5}})});
}

inline GridFunction bump(const TorusGrid& g) { return InitialFunction::bump({0.0, 0.0}, pi / 2).sample(g); }
inline GridFunction cosine(const TorusGrid& g, int k = 1) { return InitialFunction::cosine({k, 0}).sample(g); }

/// sum_{|k| <= kmax} a_k cos(k x) + b_k sin(k x) with uniform coefficients in
/// [-1, 1] / (1 + k); one- or two-dimensional.
inline GridFunction random_trig(const TorusGrid& g, std::mt19937_64& rng, int kmax = 4) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridFunction f(g, 0.0);
  const int k1max = g.dim() == 2 ? kmax : 0;
  for (int k0 = 0; k0 <= kmax; ++k0)
    for (int k1 = -k1max; k1 <= k1max; ++k1) {
      double a = u(rng) / (1.0 + k0 + std::abs(k1)), b = u(rng) / (1.0 + k0 + std::abs(k1));
      for (std::size_t i = 0; i < g.size(); ++i) {
        Point p = g.point(i);
        double phase = k0 * p[0] + k1 * p[1];
        f[i] += a * std::cos(phase) + b * std::sin(phase);
      }
    }
  return f;
}

inline GridFunction random_samples(const TorusGrid& g, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  GridFunction f(g, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = u(rng);
  return f;
}

inline GridFunction map(const GridFunction& f, auto op) {
  GridFunction out = f;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(f[i]);
  return out;
}

inline GridFunction add(const GridFunction& f, const GridFunction& g) {
  GridFunction out = f;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += g[i];
  return out;
}

/// max_x (f - g)(x): how far f rises above g.
inline double excess(const GridFunction& f, const GridFunction& g) {
  double e = -INFINITY;
  for (std::size_t i = 0; i < f.size(); ++i) e = std::max(e, f[i] - g[i]);
  return e;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("nisio_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
