#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "levylab/generator.hpp"
#include "levylab/rng.hpp"
#include "oracles.hpp"

using namespace levylab;

namespace {

double gs_radial(double r) {
  return r <= 1.0 ? 1.0 / r : std::exp(-(r - 1.0)) / r;
}

// independent symbol oracle for the gs-like d=1 kernel:
// phi(xi) = 2 \int_0^inf (1 - cos(xi r)) j(r) dr
double symbol_oracle(double xi) {
  const auto f = [xi](double r) {
    return (1.0 - std::cos(xi * r)) * gs_radial(r);
  };
  return 2.0 * (oracles::riemann(f, 0.0, 1.0, 10'000'000) +
                oracles::riemann_tail(f, 1.0, 80.0, 10'000'000));
}

}  // namespace

TEST_CASE("test function bounds and gradients") {
  RngStream rng(21, 0);
  for (const char* family :
       {"gaussian-bump", "cosine", "smoothed-indicator"}) {
    for (int dim : {1, 2}) {
      TestFunctionParams p;
      p.freq = zero_point(dim);
      p.freq[0] = 1.7;
      if (dim == 2) p.freq[1] = -0.6;
      const TestFunction tf = make_test_function(family, dim, p);
      CHECK(tf.cb1 <= tf.cb2);
      CHECK(tf.cb2 <= tf.cb3);
      CHECK(tf.hessian_bound > 0.0);
      for (int i = 0; i < 400; ++i) {
        Point x = zero_point(dim), h = zero_point(dim);
        for (int c = 0; c < dim; ++c) {
          x[c] = 6.0 * rng.uniform() - 3.0;
          h[c] = 2.0 * rng.uniform() - 1.0;
        }
        if (h.norm() >= 1.0 || h.norm() == 0.0) continue;
        // second-difference majorant
        const double second =
            std::abs(tf.f(x + h) + tf.f(x - h) - 2.0 * tf.f(x));
        CHECK(second <= tf.hessian_bound * h.squaredNorm() * (1.0 + 1e-9));
        // exact gradient against central differences
        const double fd_h = 1e-6;
        Point e = zero_point(dim);
        e[0] = fd_h;
        const double fd = (tf.f(x + e) - tf.f(x - e)) / (2.0 * fd_h);
        CHECK(tf.grad(x)[0] == doctest::Approx(fd).epsilon(1e-5));
      }
      CHECK(std::abs(tf.f(zero_point(dim))) <= tf.sup_norm * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("constant functions are annihilated") {
  const StateKernel k = make_preset_kernel("example", 1);
  TestFunctionParams p;
  p.amp = 3.5;
  const TestFunction tf = make_test_function("constant", 1, p);
  const GeneratorEval e = apply_generator(k, tf, point1(0.7));
  CHECK(e.value == 0.0);
  CHECK(e.abs_error < 1e-10);
}

TEST_CASE("symbol duality on the frozen gs-like kernel") {
  const StateKernel k = make_preset_kernel("gs-like", 1);
  GeneratorWorkspace ws;
  for (double xi : {2.0, 8.0}) {
    const double phi = symbol_oracle(xi);
    TestFunctionParams p;
    p.freq = point1(xi);
    const TestFunction cosine = make_test_function("cosine", 1, p);
    for (double x : {0.0, 0.31, -1.07}) {
      const GeneratorEval e = apply_generator(k, cosine, point1(x), {}, &ws);
      const double expected = -phi * std::cos(xi * x);
      CHECK(e.value == doctest::Approx(expected).epsilon(2e-5));
    }
  }
}

TEST_CASE("state-dependent kernel against a direct Riemann oracle") {
  const StateKernel k = make_preset_kernel("example", 1, 0.5);
  TestFunctionParams p;
  p.width = 1.0;
  const TestFunction bump = make_test_function("gaussian-bump", 1, p);
  const Point x = point1(0.4);
  const auto integrand = [&](double r) {
    const double second =
        bump.f(point1(x[0] + r)) + bump.f(point1(x[0] - r)) - 2.0 * bump.f(x);
    return second * k.A.A(x, point1(r)) * gs_radial(r);
  };
  const double oracle = oracles::riemann(integrand, 0.0, 1.0, 10'000'000) +
                        oracles::riemann_tail(integrand, 1.0, 60.0, 6'000'000);
  const GeneratorEval e = apply_generator(k, bump, x);
  CHECK(e.value == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("a-priori bound dominates quadrature values") {
  for (const char* preset : {"gs-like", "example"}) {
    const StateKernel k = make_preset_kernel(preset, 1);
    const TestFunction bump = make_test_function("gaussian-bump", 1, {});
    const double bound = generator_sup_bound(k, bump);
    GeneratorWorkspace ws;
    for (int i = 0; i <= 40; ++i) {
      const Point x = point1(-5.0 + 0.25 * i);
      const GeneratorEval e = apply_generator(k, bump, x, {}, &ws);
      CHECK(std::abs(e.value) <= bound + e.abs_error);
    }
  }
}

TEST_CASE("sup bound formula instances") {
  const StateKernel k = make_preset_kernel("gs-like", 1);
  TestFunction f = make_test_function("gaussian-bump", 1, {});
  f.sup_norm = 1.0;
  f.hessian_bound = 1.0;
  StateKernel unit = k;
  unit.J.k0 = 1.0;
  unit.A.c2 = 1.0;
  CHECK(generator_sup_bound(unit, f) == doctest::Approx(2.0));
  unit.A.c2 = 2.0;
  CHECK(generator_sup_bound(unit, f) == doctest::Approx(4.0));
}

TEST_CASE("first- and second-difference forms agree on random triples") {
  RngStream rng(33, 0);
  const StateKernel kernels[] = {make_preset_kernel("gs-like", 1),
                                 make_preset_kernel("example", 1)};
  GeneratorWorkspace ws[2];
  for (int i = 0; i < 25; ++i) {
    const int which = i % 2;
    const StateKernel& k = kernels[which];
    TestFunctionParams p;
    p.width = 0.5 + 2.0 * rng.uniform();
    p.freq = point1(0.5 + 3.0 * rng.uniform());
    const char* family = (i % 3 == 0)   ? "gaussian-bump"
                         : (i % 3 == 1) ? "cosine"
                                        : "smoothed-indicator";
    const TestFunction tf = make_test_function(family, 1, p);
    const Point x = point1(4.0 * rng.uniform() - 2.0);
    const BoundedFn bf = to_bounded(tf);
    const GeneratorEval a = apply_generator(k, bf, x, {}, &ws[which]);
    const GeneratorEval b =
        apply_generator_compensated(k, bf, x, {}, &ws[which]);
    CHECK(std::abs(a.value - b.value) <=
          a.abs_error + b.abs_error + 1e-12);
  }
}

TEST_CASE("mesh refinement stays within the reported error") {
  const StateKernel k = make_preset_kernel("example", 1);
  const TestFunction bump = make_test_function("gaussian-bump", 1, {});
  const Point x = point1(0.3);
  GeneratorOptions coarse;
  const GeneratorEval base = apply_generator(k, bump, x, coarse);
  GeneratorOptions fine;
  fine.r_min = coarse.r_min / 2.0;
  fine.tol = coarse.tol / 4.0;
  const GeneratorEval refined = apply_generator(k, bump, x, fine);
  CHECK(std::abs(base.value - refined.value) <= base.abs_error + 1e-14);
}

TEST_CASE("continuity probe decays for smooth kernels") {
  const StateKernel k = make_preset_kernel("example", 1);
  const TestFunction bump = make_test_function("gaussian-bump", 1, {});
  std::vector<Point> grid;
  for (int i = -2; i <= 2; ++i) grid.push_back(point1(double(i)));
  const auto rows = continuity_probe(k, bump, grid, 0, 20);
  CHECK(rows.back().modulus < 1e-3);
  // roughly monotone decay: allow quadrature noise at the bottom
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].modulus <= rows[i - 1].modulus + 1e-6);
  }
  // constant f: identically zero
  const TestFunction c = make_test_function("constant", 1, {});
  const auto zero_rows = continuity_probe(k, c, grid, 0, 4);
  for (const auto& row : zero_rows) CHECK(row.modulus == 0.0);
}

TEST_CASE("d=2 generator matches a polar oracle on the gs-like kernel") {
  const StateKernel k = make_preset_kernel("gs-like", 2);
  TestFunctionParams p;
  p.width = 1.0;
  const TestFunction bump = make_test_function("gaussian-bump", 2, p);
  const Point x = point2(0.2, -0.3);
  const auto angular = [&](double r) {
    const int m = 512;
    double sum = 0.0;
    for (int a = 0; a < m; ++a) {
      const double th = 2.0 * M_PI * a / m;
      const Point h = point2(r * std::cos(th), r * std::sin(th));
      sum += bump.f(x + h) + bump.f(x - h) - 2.0 * bump.f(x);
    }
    return sum * (2.0 * M_PI / m);
  };
  const auto radial = [&](double r) {
    const double j = r <= 1.0 ? 1.0 / (r * r) : std::exp(-(r - 1.0)) / (r * r);
    return 0.5 * r * j * angular(r);
  };
  const double oracle = oracles::riemann(radial, 0.0, 1.0, 40'000) +
                        oracles::riemann_tail(radial, 1.0, 40.0, 40'000);
  const GeneratorEval e = apply_generator(k, bump, x);
  CHECK(e.value == doctest::Approx(oracle).epsilon(5e-5));
}

TEST_CASE("generator table interpolates the quadrature") {
  const StateKernel k = make_preset_kernel("example", 1);
  const TestFunction bump = make_test_function("gaussian-bump", 1, {});
  const GeneratorTable table =
      build_generator_table(k, bump, -8.0, 8.0, 1025);
  GeneratorWorkspace ws;
  RngStream rng(17, 0);
  for (int i = 0; i < 20; ++i) {
    const double x = 14.0 * rng.uniform() - 7.0;
    const double direct = apply_generator(k, bump, point1(x), {}, &ws).value;
    CHECK(table(x) == doctest::Approx(direct).epsilon(1e-4));
  }
}
