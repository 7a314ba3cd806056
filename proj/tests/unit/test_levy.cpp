#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "nisio/errors.hpp"
#include "nisio/levy.hpp"

using namespace nisio;
using fixtures::pi;

namespace {

LevyQuadruple small_jump(double h) {
  LevyQuadruple q;
  q.nu = {{{h, 0.0}, 1.0 / (h * h)}};
  return q;
}

LevyQuadruple random_quadruple(std::mt19937_64& rng, int dim, const TorusGrid& g) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> idx(0, int(g.size()) - 1);
  LevyQuadruple q = LevyQuadruple::zero(dim);
  q.drift = {u(rng), dim == 2 ? u(rng) : 0.0};
  double a = u(rng), b = dim == 2 ? u(rng) : 0.0, c = dim == 2 ? u(rng) : 0.0;
  // Sigma = L L^T
  q.sigma[0][0] = a * a;
  if (dim == 2) {
    q.sigma[0][1] = q.sigma[1][0] = a * b;
    q.sigma[1][1] = b * b + c * c;
  }
  for (int j = 0; j < 3; ++j) q.mu.push_back({g.point(idx(rng)), 0.5 + 0.5 * u(rng) + 0.5});
  for (int j = 0; j < 2; ++j) {
    Point z{0.3 * u(rng) + 0.01, dim == 2 ? 0.3 * u(rng) : 0.0};
    q.nu.push_back({z, 5.0 * (1.5 + u(rng))});
  }
  q.validate();
  return q;
}

}  // namespace

TEST_CASE("pure diffusion symbol is -sigma^2 k^2 / 2") {
  TorusGrid g = make_grid(1, 32);
  Symbol s = levy_symbol(LevyQuadruple::diffusion(0.7), g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double k = g.modes(i)[0];
    CHECK(std::abs(s[i] - std::complex<double>(-0.5 * 0.49 * k * k, 0.0)) < 1e-12 * (1 + k * k));
  }
}

TEST_CASE("small-jump symbol at k=1") {
  TorusGrid g = make_grid(1, 64);
  Symbol s = levy_symbol(small_jump(0.1), g);
  std::complex<double> expected((std::cos(0.1) - 1.0) / 0.01, (std::sin(0.1) - 0.1) / 0.01);
  CHECK(std::abs(s[1] - expected) < 1e-12);
  CHECK(s[1].real() == doctest::Approx(-0.4995835).epsilon(1e-6));
  CHECK(s[1].imag() == doctest::Approx(-0.0166583).epsilon(1e-5));
}

TEST_CASE("wrapped Cauchy symbol is e^{-gamma |k|} - 1") {
  TorusGrid g = make_grid(1, 256);
  Symbol s = levy_symbol(wrapped_cauchy(g, 0.5, 1.0), g);
  CHECK(std::abs(s[2] - std::complex<double>(std::exp(-1.0) - 1.0, 0.0)) < 1e-12);
  CHECK(s[2].real() == doctest::Approx(-0.6321206).epsilon(1e-6));
  for (int k = 1; k < 40; ++k) CHECK(std::abs(s[k].real() - (std::exp(-0.5 * k) - 1.0)) < 1e-12);
  CHECK_THROWS_AS(wrapped_cauchy(make_grid(2, 16), 0.5, 1.0), ConfigError);
  CHECK_THROWS_AS(wrapped_cauchy(g, 0.0, 1.0), ConfigError);
}

TEST_CASE("apply_linear examples") {
  TorusGrid g = make_grid(1, 64);
  GridFunction c = fixtures::cosine(g);
  Symbol heat = levy_symbol(LevyQuadruple::diffusion(1.0), g);
  GridFunction same = apply_linear(heat, 0.0, c);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(same[i] == c[i]);

  Symbol half_turn = levy_symbol(LevyQuadruple::compound_poisson({{{pi, 0.0}, 1.0}}), g);
  CHECK(std::abs(half_turn[1] - std::complex<double>(-2.0, 0.0)) < 1e-15);
  CHECK(sup_distance(apply_linear(half_turn, 0.5, c), fixtures::map(c, [](double v) { return std::exp(-1.0) * v; })) <
        1e-14);
  CHECK(std::exp(-1.0) == doctest::Approx(0.3678794).epsilon(1e-6));

  CHECK(sup_distance(apply_linear(heat, 1.0, c), fixtures::map(c, [](double v) { return std::exp(-0.5) * v; })) < 1e-14);
  CHECK_THROWS_AS(apply_linear(heat, -0.1, c), ConfigError);
}

TEST_CASE("generator_apply_single examples") {
  TorusGrid g = make_grid(1, 128);
  GridFunction c = fixtures::cosine(g);
  GridFunction half = fixtures::map(c, [](double v) { return -0.5 * v; });
  CHECK(sup_distance(generator_apply_single(levy_symbol(LevyQuadruple::diffusion(1.0), g), c), half) < 1e-12);
  GridFunction approx = generator_apply_single(levy_symbol(small_jump(0.01), g), c);
  CHECK(sup_distance(approx, half) <= 5e-3);
  GridFunction zero = generator_apply_single(levy_symbol(small_jump(0.01), g), GridFunction(g, 4.0));
  for (double v : zero.values()) CHECK(v == 0.0);
}

TEST_CASE("generator agrees with finite differences of the semigroup") {
  TorusGrid g = make_grid(1, 64);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    Symbol s = levy_symbol(random_quadruple(rng, 1, g), g);
    GridFunction f = fixtures::random_trig(g, rng, 3);
    GridFunction a = generator_apply_single(s, f);
    const double h = 1e-4;
    GridFunction fwd = apply_linear(s, h, f);
    GridFunction bwd_free = apply_linear(s, 2 * h, f);
    // second-order one-sided difference: (-3 f + 4 S(h) f - S(2h) f) / (2h)
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      err = std::max(err, std::abs((-3 * f[i] + 4 * fwd[i] - bwd_free[i]) / (2 * h) - a[i]));
    CHECK(err < 1e-5 * (1.0 + a.sup_norm()));
  }
}

TEST_CASE("family_constant examples") {
  CHECK(family_constant(GeneratorFamily({LevyQuadruple::diffusion(1.0)})) == 1.0);
  CHECK(family_constant(GeneratorFamily({LevyQuadruple::compound_poisson({{{pi, 0.0}, 2.0}})})) == 2.0);
  for (double h : {0.5, 0.1, 0.01, 1e-3}) CHECK(family_constant(GeneratorFamily({small_jump(h)})) == doctest::Approx(1.0).epsilon(1e-14));
  LevyQuadruple mixed = LevyQuadruple::drift_only(-0.5);
  mixed.sigma[0][0] = 0.25;
  CHECK(family_constant(GeneratorFamily({mixed, LevyQuadruple::diffusion(1.0)})) == 1.0);
  CHECK(family_constant(GeneratorFamily({mixed, LevyQuadruple::zero()})) == 0.75);
}

TEST_CASE("quadruple validation") {
  LevyQuadruple q = LevyQuadruple::zero(2);
  q.sigma = {{{1.0, 0.5}, {0.4, 1.0}}};
  CHECK_THROWS_AS(q.validate(), ConfigError);
  q.sigma = {{{1.0, 2.0}, {2.0, 1.0}}};  // eigenvalue -1
  CHECK_THROWS_AS(q.validate(), ConfigError);
  q.sigma = {{{1.0, 1.0}, {1.0, 1.0}}};  // singular is fine
  CHECK_NOTHROW(q.validate());
  LevyQuadruple w = LevyQuadruple::compound_poisson({{{0.3, 0.0}, 0.0}});
  CHECK_THROWS_AS(w.validate(), ConfigError);
  LevyQuadruple origin;
  origin.nu = {{{2 * pi, 0.0}, 1.0}};  // wraps to 0
  CHECK_THROWS_AS(origin.validate(), ConfigError);
  CHECK_THROWS_AS(GeneratorFamily({}), ConfigError);
  CHECK_THROWS_AS(GeneratorFamily({LevyQuadruple::zero(1), LevyQuadruple::zero(2)}), ConfigError);
}

TEST_CASE("levy_symbol names the mode that breaks its invariants") {
  LevyQuadruple bad = LevyQuadruple::zero(1);
  bad.sigma[0][0] = -1.0;  // bypasses validate()
  bad.label = "anti-diffusion";
  TorusGrid g = make_grid(1, 8);
  try {
    levy_symbol(bad, g);
    FAIL("expected a ConsistencyError");
  } catch (const ConsistencyError& e) {
    std::string msg = e.what();
    CHECK(msg.find("anti-diffusion") != std::string::npos);
    CHECK(msg.find("mode (1)") != std::string::npos);
  }
}

TEST_CASE("snapping moves mu atoms only") {
  TorusGrid g = make_grid(1, 8);
  LevyQuadruple q = LevyQuadruple::compound_poisson({{{0.1, 0.0}, 1.0}, {{pi / 4, 0.0}, 1.0}});
  q.nu = {{{0.05, 0.0}, 1.0}};
  double d = snap_large_jumps(q, g);
  CHECK(d == doctest::Approx(0.1));
  CHECK(q.mu[0].at[0] == doctest::Approx(0.0).scale(1.0));
  CHECK(q.mu[1].at[0] == doctest::Approx(pi / 4));
  CHECK(q.nu[0].at[0] == 0.05);
}

TEST_CASE("property: symbol sanity for random quadruples") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    int dim = trial % 2 + 1;
    TorusGrid g = make_grid(dim, trial % 3 == 0 ? 16 : 10);
    Symbol s = levy_symbol(random_quadruple(rng, dim, g), g);
    CHECK(s[0] == std::complex<double>(0.0, 0.0));
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(s[i].real() <= 1e-12);
      CHECK(s[g.negated_slot(i)] == std::conj(s[i]));
    }
  }
}

TEST_CASE("property: linear semigroup law, contraction, constants, translation") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> ut(0.0, 0.5);
  std::uniform_int_distribution<int> off(-20, 20);
  for (int trial = 0; trial < 40; ++trial) {
    int dim = trial % 2 + 1;
    TorusGrid g = make_grid(dim, 16);
    Symbol s = levy_symbol(random_quadruple(rng, dim, g), g);
    GridFunction f = fixtures::random_samples(g, rng, 3.0);
    double t1 = ut(rng), t2 = ut(rng);
    CHECK(sup_distance(apply_linear(s, t1 + t2, f), apply_linear(s, t1, apply_linear(s, t2, f))) <= 1e-10);
    CHECK(apply_linear(s, t1, f).sup_norm() <= f.sup_norm() + 1e-9);
    GridFunction c(g, -1.25);
    GridFunction sc = apply_linear(s, t1, c);
    for (double v : sc.values()) CHECK(v == -1.25);
    std::array<int, 2> o{off(rng), off(rng)};
    CHECK(sup_distance(apply_linear(s, t1, cyclic_shift(f, o)), cyclic_shift(apply_linear(s, t1, f), o)) <=
          1e-13 * (1.0 + f.sup_norm()));
  }
}

TEST_CASE("property: positivity up to the aliasing tolerance") {
  // The bump's second derivative jumps at its edge; the truncated heat flow
  // dips below zero by at most 1.25e-5 (128/n)^2 over t in (0, 0.2].
  for (int n : {128, 256}) {
    const double eps_alias = 1.3e-5 * (128.0 / n) * (128.0 / n);
    TorusGrid g = make_grid(1, n);
    GridFunction b = fixtures::bump(g);
    const GeneratorFamily diffusions = fixtures::two_sigma();
    for (const auto& q : diffusions.members()) {
      Symbol sym = levy_symbol(q, g);
      for (int e = 0; e <= 16; ++e) {
        double t = 0.2 / std::pow(2.0, e);
        INFO("n = " << n << ", sigma^2 = " << q.sigma[0][0] << ", t = " << t);
        CHECK(apply_linear(sym, t, b).min() >= -eps_alias);
      }
    }
  }
  // Smooth nonnegative data stay nonnegative.
  TorusGrid g = make_grid(1, 128);
  GridFunction smooth = fixtures::map(fixtures::cosine(g), [](double v) { return 1.0 + v; });
  const GeneratorFamily diffusions = fixtures::two_sigma(), jumps = fixtures::cp_pair(128);
  for (const auto& q : diffusions.members()) CHECK(apply_linear(levy_symbol(q, g), 0.01, smooth).min() >= -1e-14);
  GridFunction b = fixtures::bump(g);
  for (const auto& q : jumps.members()) CHECK(apply_linear(levy_symbol(q, g), 0.2, b).min() >= -1e-14);
  // The compound Poisson kernel on grid atoms is an honest Markov kernel.
  for (const auto& q : jumps.members()) CHECK(kernel_floor(levy_symbol(q, g), g, 0.3) >= -1e-15);
}

TEST_CASE("sample_increment examples") {
  RngStream rng(99);
  for (int i = 0; i < 100; ++i) {
    Point z = sample_increment(LevyQuadruple::zero(2), 0.1, rng);
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.0);
  }
  for (int i = 0; i < 10; ++i) CHECK(sample_increment(LevyQuadruple::drift_only(1.0), 0.25, rng)[0] == 0.25);

  IncrementSampler heat(LevyQuadruple::diffusion(1.0));
  double mean = 0.0, m2 = 0.0;
  const int count = 100000;
  for (int i = 0; i < count; ++i) {
    double x = heat.sample(0.01, rng)[0];
    double d = x - mean;
    mean += d / (i + 1);
    m2 += d * (x - mean);
  }
  double var = m2 / (count - 1);
  CHECK(var >= 0.0094);
  CHECK(var <= 0.0106);
  CHECK_THROWS_AS(heat.sample(0.0, rng), ConfigError);
}

TEST_CASE("increment sampler reproduces the characteristic function") {
  // E e^{ik X_dt} = e^{dt psi(k)} on the torus for every quadruple.
  TorusGrid g = make_grid(1, 32);
  LevyQuadruple q = LevyQuadruple::compound_poisson({{{pi / 2, 0.0}, 1.5}, {{-pi / 4, 0.0}, 0.5}});
  q.drift = {0.3, 0.0};
  q.sigma[0][0] = 0.2;
  q.nu = {{{0.2, 0.0}, 10.0}};
  Symbol psi = levy_symbol(q, g);
  IncrementSampler sampler(q);
  RngStream rng(5);
  const double dt = 0.4;
  const int count = 200000;
  for (int k : {1, 2, 3}) {
    std::complex<double> acc = 0.0;
    RngStream local = RngStream::for_path(5, k);
    for (int i = 0; i < count; ++i) acc += std::polar(1.0, k * sampler.sample(dt, local)[0]);
    acc /= double(count);
    std::complex<double> expected = std::exp(dt * psi[k]);
    CHECK(std::abs(acc - expected) < 4.0 / std::sqrt(double(count)));
  }
}

TEST_CASE("rng streams are reproducible and distinct per path") {
  RngStream a = RngStream::for_path(42, 7), b = RngStream::for_path(42, 7), c = RngStream::for_path(42, 8);
  std::uint64_t x = a.bits();
  CHECK(x == b.bits());
  CHECK(x != c.bits());
  CHECK(splitmix64(0) != splitmix64(1));
}
