#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "levylab/frozen.hpp"
#include "levylab/quadrature.hpp"
#include "levylab/stats.hpp"
#include "oracles.hpp"

using namespace levylab;

namespace {

double gs_radial(double r) {
  return r <= 1.0 ? 1.0 / r : std::exp(-(r - 1.0)) / r;
}

}  // namespace

TEST_CASE("symbol: zero frequency, symmetry, cache coherence") {
  const FrozenKernel fk(make_preset_kernel("gs-like", 1), point1(0.0));
  CHECK(fk.eval_symbol(point1(0.0)) == 0.0);
  const double a = fk.eval_symbol(point1(3.7));
  const double b = fk.eval_symbol(point1(-3.7));
  CHECK(a == b);          // phi(xi) = phi(-xi), bit-identical via the cache
  CHECK(a == fk.eval_symbol(point1(3.7)));
  CHECK(a >= 0.0);
}

TEST_CASE("symbol against the 1e7-panel Riemann oracle at xi = 8") {
  const FrozenKernel fk(make_preset_kernel("gs-like", 1), point1(0.0));
  const double xi = 8.0;
  const auto f = [xi](double r) {
    return (1.0 - std::cos(xi * r)) * gs_radial(r);
  };
  const double oracle = 2.0 * (oracles::riemann(f, 0.0, 1.0, 10'000'000) +
                               oracles::riemann_tail(f, 1.0, 80.0, 10'000'000));
  CHECK(fk.symbol_radial(xi) == doctest::Approx(oracle).epsilon(1e-5));
}

TEST_CASE("large-frequency growth is logarithmic for l == 1") {
  const FrozenKernel fk(make_preset_kernel("gs-like", 1), point1(0.0));
  std::vector<double> lxi, phi;
  for (int k = 4; k <= 12; ++k) {
    const double xi = std::ldexp(1.0, k);
    lxi.push_back(std::log(xi));
    phi.push_back(fk.symbol_radial(xi));
  }
  const LinearFit fit = fit_line(lxi, phi);
  // phi(xi) ~ 2 ln xi + const for the slowly varying preset (the stable
  // contrast would grow like a power)
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.05));
  CHECK(fit.r_squared > 0.999);
}

TEST_CASE("d=2 symbol: Bessel reduction against an angular Riemann oracle") {
  const FrozenKernel fk(make_preset_kernel("gs-like", 2), point2(0.0, 0.0));
  const double xi = 3.0;
  const auto angular = [xi](double r) {
    const int m = 2048;
    double sum = 0.0;
    for (int a = 0; a < m; ++a) {
      sum += 1.0 - std::cos(xi * r * std::cos(2.0 * M_PI * a / m));
    }
    return sum * (2.0 * M_PI / m);
  };
  const auto radial = [&](double r) {
    const double j = r <= 1.0 ? 1.0 / (r * r) : std::exp(-(r - 1.0)) / (r * r);
    return r * j * angular(r);
  };
  const double oracle = oracles::riemann(radial, 0.0, 1.0, 20'000) +
                        oracles::riemann_tail(radial, 1.0, 50.0, 20'000);
  CHECK(fk.symbol_radial(xi) == doctest::Approx(oracle).epsilon(1e-5));
}

TEST_CASE("resolvent: constants and on-grid eigenfunctions") {
  const FrozenKernel fk(make_preset_kernel("gs-like", 1), point1(0.0));
  ResolventOptions opts;
  opts.n_per_axis = 512;
  opts.box_halfwidth = 32.0;
  opts.residual_probes = 0;
  const double lambda = 2.0;

  const ResolventField flat =
      resolvent_fft(fk, [](const Point&) { return 1.0; }, lambda, opts);
  for (double v : flat.values) {
    CHECK(v == doctest::Approx(1.0 / lambda).epsilon(1e-12));
  }

  const double xi_k = M_PI * 24.0 / opts.box_halfwidth;  // exact grid mode
  const ResolventField wave = resolvent_fft(
      fk, [xi_k](const Point& x) { return std::cos(xi_k * x[0]); }, lambda,
      opts);
  const double mult = 1.0 / (lambda + fk.symbol_radial(xi_k));
  for (int i = 0; i < opts.n_per_axis; ++i) {
    const double expected = mult * std::cos(xi_k * wave.grid_coord(i));
    CHECK(wave.values[i] == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("resolvent: contraction, residual, interpolation consistency") {
  const FrozenKernel fk(make_preset_kernel("gs-like", 1), point1(0.0));
  ResolventOptions opts;
  opts.n_per_axis = 4096;
  opts.box_halfwidth = 64.0;
  const double lambda = 1.0;
  const auto g = [](const Point& x) {
    return std::exp(-x[0] * x[0] / 8.0);
  };
  const ResolventField field = resolvent_fft(fk, g, lambda, opts);
  CHECK(field.max_abs() <= field.grid_max_abs_g / lambda * (1.0 + 1e-9));
  CHECK(field.residual_sup <= 1e-3 * field.grid_max_abs_g);
  CHECK_FALSE(field.residual_flagged);
  // spectral evaluation reproduces grid values
  for (int i : {11, 977, 2048, 3333}) {
    CHECK(field.value_at(point1(field.grid_coord(i))) ==
          doctest::Approx(field.values[i]).epsilon(1e-9));
  }
}

TEST_CASE("residual at midpoints shrinks when the mesh is halved") {
  const FrozenKernel fk(make_preset_kernel("gs-like", 1), point1(0.0));
  TestFunctionParams p;
  p.radius = 2.0;
  p.sharpness = 0.35;
  const TestFunction rough = make_test_function("smoothed-indicator", 1, p);
  ResolventOptions coarse;
  coarse.n_per_axis = 256;
  coarse.box_halfwidth = 32.0;
  coarse.residual_probes = 16;
  coarse.residual_at_midpoints = true;
  ResolventOptions fine = coarse;
  fine.n_per_axis = 512;
  const ResolventField uc = resolvent_fft(fk, rough.f, 1.0, coarse);
  const ResolventField uf = resolvent_fft(fk, rough.f, 1.0, fine);
  CHECK(uf.residual_sup < uc.residual_sup);
}

TEST_CASE("d=2 resolvent on a small grid") {
  const FrozenKernel fk(make_preset_kernel("gs-like", 2), point2(0.0, 0.0));
  ResolventOptions opts;
  opts.n_per_axis = 128;
  opts.box_halfwidth = 16.0;
  opts.residual_probes = 6;
  opts.residual_tol_factor = 5e-3;
  const auto g = [](const Point& x) {
    return std::exp(-x.squaredNorm() / 4.0);
  };
  const ResolventField field = resolvent_fft(fk, g, 1.0, opts);
  CHECK(field.max_abs() <= field.grid_max_abs_g * (1.0 + 1e-9));
  CHECK(field.residual_sup <= 5e-3 * field.grid_max_abs_g);
}

TEST_CASE("lambda must be positive") {
  const FrozenKernel fk(make_preset_kernel("gs-like", 1), point1(0.0));
  CHECK_THROWS_AS(
      resolvent_fft(fk, [](const Point&) { return 1.0; }, 0.0, {}),
      std::domain_error);
}

TEST_CASE("sample_increment: symmetry and second moment") {
  const StateKernel base = make_preset_kernel("example", 1, 0.5);
  const FrozenKernel fk(base, point1(0.3));
  const double dt = 0.05, eps = 0x1p-10;
  RngStream rng(101, 0);
  const std::size_t n = 400000;
  std::vector<double> xs(n), sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point d = fk.sample_increment(dt, eps, rng);
    xs[i] = d[0];
    sq[i] = d[0] * d[0];
  }
  const MeanStderr mean = mean_stderr(xs);
  CHECK(std::abs(mean.mean) <= 4.0 * mean.stderr_);

  // E ||D||^2 = dt (sigma^2 d + \int_{||h||>=eps} ||h||^2 K(x0,.))
  const auto section = [&](double r) {
    return base.A.A(point1(0.3), point1(r)) * base.J.radial(r);
  };
  QuadOptions q;
  q.rel_tol = 1e-10;
  const double jump_m2 =
      2.0 * (integrate([&](double r) { return r * r * section(r); }, eps, 1.0, q)
                 .value +
             integrate_to_infinity(
                 [&](double r) { return r * r * section(r); }, 1.0, q)
                 .value);
  const double expected = dt * (fk.small_jump_sigma2(eps) + jump_m2);
  const MeanStderr m2 = mean_stderr(sq);
  CHECK(std::abs(m2.mean - expected) <= 4.0 * m2.stderr_);
}

TEST_CASE("sample_increment: characteristic function matches the truncated "
          "symbol") {
  const StateKernel base = make_preset_kernel("example", 1, 0.5);
  const FrozenKernel fk(base, point1(0.3));
  const double dt = 0.1, eps = 0x1p-10;
  RngStream rng(202, 0);
  const std::size_t n = 1'000'000;
  std::vector<double> draws(n);
  for (std::size_t i = 0; i < n; ++i) {
    draws[i] = fk.sample_increment(dt, eps, rng)[0];
  }
  const double sigma2 = fk.small_jump_sigma2(eps);
  std::vector<double> buffer(n);
  for (double xi : {1.0, 4.0, 16.0}) {
    for (std::size_t i = 0; i < n; ++i) {
      buffer[i] = std::cos(xi * draws[i]);
    }
    const MeanStderr ms = mean_stderr(buffer);
    const double expected = std::exp(
        -dt * (fk.truncated_symbol(point1(xi), eps) + 0.5 * sigma2 * xi * xi));
    INFO("xi = " << xi);
    CHECK(std::abs(ms.mean - expected) <= 4.0 * ms.stderr_);
  }
}

TEST_CASE("sample_increment: mean square shrinks with dt") {
  const StateKernel base = make_preset_kernel("gs-like", 1);
  const FrozenKernel fk(base, point1(0.0));
  const double eps = 0x1p-8;
  RngStream rng(303, 0);
  double prev = 1e300;
  for (double dt : {0.1, 0.01, 0.001}) {
    double acc = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      acc += fk.sample_increment(dt, eps, rng).squaredNorm();
    }
    acc /= n;
    CHECK(acc < prev);
    prev = acc;
  }
}

TEST_CASE("increment draws are reproducible per stream") {
  const StateKernel base = make_preset_kernel("example", 1);
  const FrozenKernel fk(base, point1(0.0));
  RngStream a(7, 42), b(7, 42);
  for (int i = 0; i < 100; ++i) {
    CHECK(fk.sample_increment(0.01, 0x1p-10, a)[0] ==
          fk.sample_increment(0.01, 0x1p-10, b)[0]);
  }
}

TEST_CASE("increment argument validation") {
  const FrozenKernel fk(make_preset_kernel("gs-like", 1), point1(0.0));
  RngStream rng(1, 0);
  CHECK_THROWS_AS(fk.sample_increment(0.0, 0.5, rng), std::domain_error);
  CHECK_THROWS_AS(fk.sample_increment(0.1, 1.5, rng), std::domain_error);
}
