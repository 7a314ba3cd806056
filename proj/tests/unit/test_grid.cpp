#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "nisio/errors.hpp"
#include "nisio/fft.hpp"
#include "nisio/io.hpp"

using namespace nisio;
using fixtures::pi;

TEST_CASE("make_grid lays out points and validates sizes") {
  TorusGrid g = make_grid(1, 8);
  CHECK(g.size() == 8);
  CHECK(g.spacing() == doctest::Approx(pi / 4).epsilon(1e-15));
  for (int j = 0; j < 8; ++j) CHECK(g.point(j)[0] == doctest::Approx(-pi + j * pi / 4).epsilon(1e-15));

  TorusGrid g2 = make_grid(2, 64);
  CHECK(g2.size() == 4096);
  CHECK(g2.spacing() == doctest::Approx(pi / 32).epsilon(1e-15));
  CHECK(g2.spacing() * g2.n() == doctest::Approx(2 * pi).epsilon(1e-15));

  CHECK_THROWS_AS(make_grid(1, 3), ConfigError);
  CHECK_THROWS_AS(make_grid(3, 8), ConfigError);
  CHECK_THROWS_AS(make_grid(0, 8), ConfigError);
  CHECK_THROWS_AS(make_grid(1, 2), ConfigError);
  CHECK_THROWS_AS(make_grid(1, 1 << 17), ConfigError);
  CHECK_NOTHROW(make_grid(1, 4));
}

TEST_CASE("mode slots cover -n/2+1 .. n/2") {
  TorusGrid g = make_grid(1, 8);
  std::vector<int> modes;
  for (int s = 0; s < 8; ++s) modes.push_back(g.mode_of_slot(s));
  CHECK(modes == std::vector<int>{0, 1, 2, 3, 4, -3, -2, -1});
  CHECK(g.negated_slot(1) == 7);
  CHECK(g.negated_slot(4) == 4);
  CHECK(g.negated_slot(0) == 0);
}

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(pi) == doctest::Approx(pi));
  CHECK(wrap_angle(-pi) == doctest::Approx(pi));
  CHECK(wrap_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
  CHECK(wrap_angle(0.25) == 0.25);
  for (double x : {-100.0, -7.0, 0.0, 1e-9, 50.0}) {
    double w = wrap_angle(x);
    CHECK(w > -pi);
    CHECK(w <= pi);
    CHECK(std::remainder(x - w, 2 * pi) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("nearest grid point and snap distance") {
  TorusGrid g = make_grid(1, 8);
  CHECK(g.nearest({-pi, 0}) == 0);
  CHECK(g.nearest({pi, 0}) == 0);  // pi and -pi coincide
  CHECK(g.nearest({0.1, 0}) == 4);
  CHECK(g.snap_distance({0.1, 0}) == doctest::Approx(0.1));
  CHECK(g.nearest({pi - 0.1, 0}) == 0);
  TorusGrid g2 = make_grid(2, 8);
  CHECK(g2.nearest({0.0, -pi / 4}) == g2.flat(4, 3));
}

TEST_CASE("builtin initial functions sample as defined") {
  TorusGrid g = make_grid(1, 8);
  GridFunction c = InitialFunction::cosine({1, 0}).sample(g);
  for (std::size_t j = 0; j < 8; ++j) CHECK(c[j] == doctest::Approx(std::cos(g.point(j)[0])).epsilon(1e-15));

  GridFunction k = InitialFunction::constant(3.5).sample(g);
  for (double v : k.values()) CHECK(v == 3.5);

  TorusGrid g128 = make_grid(1, 128);
  GridFunction b = InitialFunction::bump({0.0, 0.0}, pi / 2).sample(g128);
  CHECK(b[64] == 1.0);  // x = 0
  for (std::size_t j = 0; j < g128.size(); ++j) {
    CHECK(b[j] >= 0.0);
    if (std::abs(g128.point(j)[0]) > pi / 2) CHECK(b[j] == 0.0);
  }
  CHECK_THROWS_AS(InitialFunction::bump({0.0, 0.0}, 0.0), ConfigError);
  CHECK_THROWS_AS(InitialFunction::bump({0.0, 0.0}, -1.0), ConfigError);
}

TEST_CASE("bump is periodized around its center") {
  TorusGrid g = make_grid(1, 64);
  GridFunction b = InitialFunction::bump({pi, 0.0}, 1.0).sample(g);
  CHECK(b[0] == doctest::Approx(1.0));  // -pi is the same point as pi
  CHECK(b[1] == doctest::Approx(b[63]).epsilon(1e-14));
}

TEST_CASE("forward transform follows f = sum c_k e^{ikx}") {
  TorusGrid g = make_grid(1, 8);
  Spectrum s = forward_transform(InitialFunction::cosine({1, 0}).sample(g));
  for (int k = -3; k <= 4; ++k) {
    double expected = std::abs(k) == 1 ? 0.5 : 0.0;
    CHECK(std::abs(s.at(k) - std::complex<double>(expected, 0.0)) < 1e-15);
  }
  Spectrum one = forward_transform(GridFunction(g, 1.0));
  CHECK(std::abs(one.at(0) - 1.0) < 1e-15);
  for (int k = 1; k <= 4; ++k) CHECK(std::abs(one.at(k)) < 1e-15);

  TorusGrid g2 = make_grid(2, 8);
  Spectrum s2 = forward_transform(InitialFunction::cosine({1, 2}, 0.3).sample(g2));
  CHECK(std::abs(s2.at(1, 2) - 0.5 * std::polar(1.0, 0.3)) < 1e-14);
  CHECK(std::abs(s2.at(-1, -2) - 0.5 * std::polar(1.0, -0.3)) < 1e-14);
}

TEST_CASE("transform round trip and conjugate symmetry on random data") {
  std::mt19937_64 rng(7);
  for (int dim : {1, 2}) {
    for (int n : {4, 6, 16, 64}) {
      TorusGrid g = make_grid(dim, n);
      GridFunction f = fixtures::random_samples(g, rng, 10.0);
      Spectrum s = forward_transform(f);
      CHECK(sup_distance(inverse_transform(s), f) <= 1e-12 * (1.0 + f.sup_norm()));
      for (std::size_t i = 0; i < s.coeffs.size(); ++i)
        CHECK(std::abs(s.coeffs[g.negated_slot(i)] - std::conj(s.coeffs[i])) < 1e-12 * (1.0 + f.sup_norm()));
    }
  }
}

TEST_CASE("FFT path agrees with the direct DFT reference") {
  std::mt19937_64 rng(11);
  for (int dim : {1, 2}) {
    TorusGrid g = make_grid(dim, 16);
    std::vector<std::complex<double>> in(g.size()), fast(g.size()), slow(g.size());
    std::normal_distribution<double> nd;
    for (auto& z : in) z = {nd(rng), nd(rng)};
    for (int sign : {-1, 1}) {
      fft::direct_dft(g, in, slow, sign);
      if (sign < 0) {
        fft::forward(g, std::span<const std::complex<double>>(in), fast);
      } else {
        fft::backward(g, in, fast);
      }
      for (std::size_t i = 0; i < in.size(); ++i) CHECK(std::abs(fast[i] - slow[i]) < 1e-12);
    }
  }
}

TEST_CASE("inverse transform rejects spectra of non-real functions") {
  TorusGrid g = make_grid(1, 8);
  Spectrum s{g, std::vector<std::complex<double>>(8, 0.0)};
  s.coeffs[1] = {0.0, 1.0};  // e^{ix} alone is complex
  CHECK_THROWS_AS(inverse_transform(s), ConsistencyError);
}

TEST_CASE("sup_distance examples") {
  TorusGrid g = make_grid(1, 16);
  GridFunction c = InitialFunction::cosine({1, 0}).sample(g);
  CHECK(sup_distance(c, c) == 0.0);
  CHECK(sup_distance(GridFunction(g, 2.0), GridFunction(g, 5.0)) == 3.0);
  CHECK(sup_distance(c, fixtures::map(c, [](double v) { return -v; })) == 2.0);
  CHECK_THROWS_AS(sup_distance(c, GridFunction(make_grid(1, 8), 0.0)), ConfigError);
}

TEST_CASE("pointwise_max examples") {
  TorusGrid g = make_grid(1, 16);
  GridFunction c = InitialFunction::cosine({1, 0}).sample(g);
  GridFunction mc = fixtures::map(c, [](double v) { return -v; });
  std::vector<GridFunction> one{c};
  CHECK(sup_distance(pointwise_max(one), c) == 0.0);
  std::vector<GridFunction> pair{c, mc};
  CHECK(sup_distance(pointwise_max(pair), fixtures::map(c, [](double v) { return std::abs(v); })) == 0.0);
  std::vector<GridFunction> consts{GridFunction(g, 1.0), GridFunction(g, 2.0)};
  CHECK(sup_distance(pointwise_max(consts), GridFunction(g, 2.0)) == 0.0);
  CHECK_THROWS_AS(pointwise_max(std::span<const GridFunction>()), ConfigError);
}

TEST_CASE("cyclic_shift examples") {
  TorusGrid g = make_grid(1, 16);
  GridFunction c = InitialFunction::cosine({1, 0}).sample(g);
  CHECK(sup_distance(cyclic_shift(c, {0, 0}), c) == 0.0);
  CHECK(sup_distance(cyclic_shift(c, {16, 0}), c) == 0.0);
  CHECK(sup_distance(cyclic_shift(c, {8, 0}), fixtures::map(c, [](double v) { return -v; })) < 1e-15);
}

TEST_CASE("property: cyclic_shift is an isometry commuting with pointwise_max") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> off(-40, 40);
  for (int trial = 0; trial < 50; ++trial) {
    TorusGrid g = make_grid(trial % 2 + 1, 16);
    GridFunction f = fixtures::random_samples(g, rng), h = fixtures::random_samples(g, rng);
    std::array<int, 2> o{off(rng), off(rng)};
    GridFunction sf = cyclic_shift(f, o);
    CHECK(sf.sup_norm() == f.sup_norm());
    CHECK(sup_distance(cyclic_shift(f, o), cyclic_shift(h, o)) == sup_distance(f, h));
    std::vector<GridFunction> a{f, h}, b{sf, cyclic_shift(h, o)};
    CHECK(sup_distance(cyclic_shift(pointwise_max(a), o), pointwise_max(b)) == 0.0);
  }
}

TEST_CASE("property: pointwise_max is monotone") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    TorusGrid g = make_grid(1, 32);
    GridFunction f = fixtures::random_samples(g, rng), h = fixtures::random_samples(g, rng);
    GridFunction up = fixtures::map(f, [&](double v) { return v + u(rng); });
    std::vector<GridFunction> lo{f, h}, hi{up, h};
    CHECK(fixtures::excess(pointwise_max(lo), pointwise_max(hi)) <= 0.0);
  }
}

TEST_CASE("GridFunction rejects non-finite values") {
  TorusGrid g = make_grid(1, 4);
  CHECK_THROWS_AS(GridFunction(g, std::vector<double>{0, 1, NAN, 2}), ConfigError);
  CHECK_THROWS_AS(GridFunction(g, std::vector<double>{0, 1, INFINITY, 2}), ConfigError);
  CHECK_THROWS_AS(GridFunction(g, std::vector<double>{0, 1, 2}), ConfigError);
}

TEST_CASE("trigonometric interpolation reproduces band-limited functions") {
  TorusGrid g = make_grid(1, 32);
  InitialFunction c = InitialFunction::cosine({3, 0}, 0.4);
  GridFunction f = c.sample(g);
  for (double x : {-3.0, -0.123, 0.0, 1.7, 3.1}) CHECK(interpolate(f, {x, 0.0}) == doctest::Approx(c.evaluate({x, 0.0})).epsilon(1e-12));
  InitialFunction s = InitialFunction::samples(f);
  CHECK(s.evaluate({0.5, 0.0}) == doctest::Approx(c.evaluate({0.5, 0.0})).epsilon(1e-12));
  CHECK(interpolate(f, g.point(5)) == doctest::Approx(f[5]).epsilon(1e-13));
}

TEST_CASE("grid function CSV round trip and malformed files") {
  auto dir = fixtures::temp_dir("grid_csv");
  for (int dim : {1, 2}) {
    TorusGrid g = make_grid(dim, 8);
    std::mt19937_64 rng(dim);
    GridFunction f = fixtures::random_samples(g, rng);
    auto path = dir / ("f" + std::to_string(dim) + ".csv");
    io::write_atomic(path, io::grid_function_csv(f));
    GridFunction back = io::read_grid_function_csv(path.string(), g);
    CHECK(sup_distance(back, f) == 0.0);
    CHECK(sup_distance(InitialFunction::from_file(path.string(), g).sample(g), f) == 0.0);
  }
  std::ifstream first(dir / "f1.csv");
  std::string header;
  std::getline(first, header);
  CHECK(header == "index,x,value");

  TorusGrid g = make_grid(1, 8);
  CHECK_THROWS_AS(io::read_grid_function_csv((dir / "missing.csv").string(), g), ConfigError);
  io::write_atomic(dir / "bad.csv", "index,x,value\n0,0,1\n");
  CHECK_THROWS_AS(io::read_grid_function_csv((dir / "bad.csv").string(), g), ConfigError);
  io::write_atomic(dir / "bad2.csv", "i,x,value\n");
  CHECK_THROWS_AS(io::read_grid_function_csv((dir / "bad2.csv").string(), g), ConfigError);
  io::write_atomic(dir / "bad3.csv", "index,x,value\n0,0,abc\n");
  CHECK_THROWS_AS(io::read_grid_function_csv((dir / "bad3.csv").string(), g), ConfigError);
  CHECK_THROWS_AS(io::read_grid_function_csv((dir / "f2.csv").string(), g), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("format_double keeps 17 significant digits") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(io::format_double(pi)) == pi);
  CHECK(io::format_double(NAN) == "nan");
  CHECK(io::format_double(-INFINITY) == "-inf");
}
