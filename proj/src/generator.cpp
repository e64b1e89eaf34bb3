#include "levylab/generator.hpp"

#include <cmath>

#include "levylab/parallel.hpp"
#include "levylab/quadrature.hpp"

namespace levylab {

namespace {

// c2-envelope of the kernel mass of {||h|| > R}; drives the outer cutoff.
double tail_mass_beyond(const StateKernel& kernel, double radius) {
  const int d = kernel.dim();
  QuadOptions opts;
  opts.rel_tol = 1e-6;
  opts.abs_tol = 1e-16;
  const auto g = [&](double r) {
    return std::pow(r, d - 1) * kernel.J.radial(r);
  };
  QuadResult q = integrate_to_infinity(g, radius, opts);
  return kernel.A.c2 * sphere_surface(d) * (q.value + q.error);
}

// c2-envelope of \int_{||h||<r} ||h||^2 K dx; drives the inner majorant.
double small_ball_h2_mass(const StateKernel& kernel, double radius) {
  const int d = kernel.dim();
  QuadOptions opts;
  opts.rel_tol = 1e-6;
  opts.abs_tol = 1e-60;
  const auto g = [&](double r) {
    return std::pow(r, d + 1) * kernel.J.radial(r);
  };
  QuadResult q = integrate_to_zero(g, radius, opts);
  return kernel.A.c2 * sphere_surface(d) * (q.value + q.error);
}

// Angular trapezoid average over the circle, doubled until stable.
double angular_integral(const std::function<double(const Point&)>& fn,
                        double radius, int start_points, double tol) {
  int m = start_points;
  auto eval = [&](int points) {
    double sum = 0.0;
    for (int a = 0; a < points; ++a) {
      const double th = 2.0 * M_PI * a / points;
      sum += fn(point2(radius * std::cos(th), radius * std::sin(th)));
    }
    return sum * 2.0 * M_PI / points;
  };
  double prev = eval(m);
  while (m < 1024) {
    m *= 2;
    const double next = eval(m);
    if (std::abs(next - prev) <= tol * (1.0 + std::abs(next))) return next;
    prev = next;
  }
  return prev;
}

struct RadialIntegrand {
  const StateKernel* kernel;
  Point x;
  std::function<double(const Point&, const Point&)> difference;  // (x, h)
  int angular_points;
  double angular_tol;

  double operator()(double r) const {
    const int d = kernel->dim();
    if (d == 1) {
      const Point hp = point1(r), hm = point1(-r);
      const double j = kernel->J.radial(r);
      return 0.5 * (difference(x, hp) * kernel->A.A(x, hp) +
                    difference(x, hm) * kernel->A.A(x, hm)) *
             j;
    }
    const double j = kernel->J.radial(r);
    if (j == 0.0) return 0.0;
    const Point xx = x;
    const auto& diff = difference;
    const auto& A = kernel->A.A;
    const double ang = angular_integral(
        [&](const Point& h) { return diff(xx, h) * A(xx, h); }, r,
        angular_points, angular_tol);
    return 0.5 * r * j * ang;
  }
};

double cached_mass(std::map<double, double>& cache, std::mutex& mutex,
                   double key, const std::function<double(double)>& compute) {
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double value = compute(key);
  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(key, value);
  return value;
}

GeneratorEval run_quadrature(const StateKernel& kernel, const BoundedFn& f,
                             const Point& x, const GeneratorOptions& opts,
                             const RadialIntegrand& integrand,
                             GeneratorWorkspace* workspace) {
  GeneratorWorkspace local;
  GeneratorWorkspace& ws = workspace ? *workspace : local;
  const auto tail_at = [&](double radius) {
    return cached_mass(ws.tail_mass, ws.mutex, radius, [&](double r) {
      return tail_mass_beyond(kernel, r);
    });
  };
  const auto ball_at = [&](double radius) {
    return cached_mass(ws.ball_h2_mass, ws.mutex, radius, [&](double r) {
      return small_ball_h2_mass(kernel, r);
    });
  };

  GeneratorEval out;
  out.r_min = opts.r_min;

  // [0, r_min): Taylor majorant, no quadrature.
  out.small_ball_bound = 0.5 * f.hessian_bound * ball_at(opts.r_min);

  // [r_min, 1]: adaptive on the log scale.
  QuadOptions inner_opts;
  inner_opts.abs_tol = 0.35 * opts.tol;
  inner_opts.rel_tol = 1e-12;
  inner_opts.max_intervals = opts.max_intervals;
  const auto log_integrand = [&](double t) {
    const double r = std::exp(t);
    return integrand(r) * r;
  };
  QuadResult qi =
      integrate(log_integrand, std::log(opts.r_min), 0.0, inner_opts);
  out.inner = qi.value;
  bool converged = qi.converged;
  double err = qi.error;

  // [1, r_max]: octave sweep until the discarded-tail bound is small.
  QuadOptions outer_opts;
  outer_opts.abs_tol = 0.1 * opts.tol;
  outer_opts.rel_tol = 1e-12;
  double lo = 1.0;
  double tail_bound = 0.0;
  for (int oct = 0; oct < 60; ++oct) {
    const double hi = 2.0 * lo;
    QuadResult qo = integrate(integrand, lo, hi, outer_opts);
    out.middle += qo.value;
    err += qo.error;
    converged = converged && qo.converged;
    lo = hi;
    tail_bound = 2.0 * f.sup_norm * tail_at(lo);
    if (tail_bound <= 0.2 * opts.tol) break;
  }
  out.r_max = lo;
  out.outer_bound = tail_bound;

  out.value = out.inner + out.middle;
  out.abs_error = err + out.small_ball_bound + out.outer_bound;
  out.inconclusive = !converged;
  if (!std::isfinite(out.value)) {
    throw quadrature_error("generator quadrature produced a non-finite value");
  }
  return out;
}

}  // namespace

GeneratorEval apply_generator(const StateKernel& kernel, const BoundedFn& f,
                              const Point& x, const GeneratorOptions& opts,
                              GeneratorWorkspace* workspace) {
  RadialIntegrand integrand;
  integrand.kernel = &kernel;
  integrand.x = x;
  integrand.angular_points = opts.angular_points;
  integrand.angular_tol = 0.02 * opts.tol;
  const auto& fn = f.f;
  integrand.difference = [&fn](const Point& xx, const Point& h) {
    return fn(xx + h) + fn(xx - h) - 2.0 * fn(xx);
  };
  return run_quadrature(kernel, f, x, opts, integrand, workspace);
}

GeneratorEval apply_generator_compensated(const StateKernel& kernel,
                                          const BoundedFn& f, const Point& x,
                                          const GeneratorOptions& opts,
                                          GeneratorWorkspace* workspace) {
  RadialIntegrand integrand;
  integrand.kernel = &kernel;
  integrand.x = x;
  integrand.angular_points = opts.angular_points;
  integrand.angular_tol = 0.02 * opts.tol;
  const auto& fn = f.f;
  const auto& grad = f.grad;
  // The gradient compensator cancels only after the +-h average, so this is
  // a genuinely different algebraic route. The "1/2 *" in run_quadrature's
  // radial form is offset by counting each |h| twice across +-directions,
  // hence the factor 2 here.
  integrand.difference = [&fn, &grad](const Point& xx, const Point& h) {
    double v = fn(xx + h) - fn(xx);
    if (h.norm() < 1.0) v -= grad(xx).dot(h);
    return 2.0 * v;
  };
  return run_quadrature(kernel, f, x, opts, integrand, workspace);
}

double generator_sup_bound(const StateKernel& kernel, const TestFunction& f) {
  return 2.0 * std::max(f.sup_norm, f.hessian_bound) * kernel.A.c2 *
         kernel.J.k0;
}

std::vector<ContinuityRow> continuity_probe(const StateKernel& kernel,
                                            const TestFunction& f,
                                            const std::vector<Point>& x_grid,
                                            int k_min, int k_max,
                                            const GeneratorOptions& opts) {
  GeneratorWorkspace ws;
  std::vector<double> base(x_grid.size());
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    base[i] = apply_generator(kernel, f, x_grid[i], opts, &ws).value;
  }
  std::vector<ContinuityRow> rows;
  for (int k = k_min; k <= k_max; ++k) {
    const double step = std::ldexp(1.0, -k);
    double modulus = 0.0;
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      Point y = x_grid[i];
      y[0] += step;
      const double shifted = apply_generator(kernel, f, y, opts, &ws).value;
      modulus = std::max(modulus, std::abs(shifted - base[i]));
    }
    rows.push_back({k, modulus});
  }
  return rows;
}

GeneratorTable::GeneratorTable(double lo, double dx, std::vector<double> values)
    : lo_(lo), dx_(dx), values_(std::move(values)) {
  slopes_.resize(values_.size(), 0.0);
  for (std::size_t i = 1; i + 1 < values_.size(); ++i) {
    slopes_[i] = 0.5 * (values_[i + 1] - values_[i - 1]);
  }
  if (values_.size() >= 2) {
    slopes_.front() = values_[1] - values_[0];
    slopes_.back() = values_[values_.size() - 1] - values_[values_.size() - 2];
  }
}

double GeneratorTable::operator()(double x) const {
  const double pos = (x - lo_) / dx_;
  if (pos <= 0.0) return values_.front();
  const double last = static_cast<double>(values_.size() - 1);
  if (pos >= last) return values_.back();
  const std::size_t i = static_cast<std::size_t>(pos);
  const double t = pos - static_cast<double>(i);
  const double y0 = values_[i], y1 = values_[i + 1];
  const double m0 = slopes_[i], m1 = slopes_[i + 1];
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
         (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
}

GeneratorTable build_generator_table(const StateKernel& kernel,
                                     const TestFunction& f, double lo,
                                     double hi, std::size_t points,
                                     unsigned threads,
                                     const GeneratorOptions& opts) {
  if (kernel.dim() != 1) {
    throw std::domain_error("GeneratorTable supports d = 1 only");
  }
  std::vector<double> values(points);
  const double dx = (hi - lo) / static_cast<double>(points - 1);
  const BoundedFn bf = to_bounded(f);
  GeneratorWorkspace ws;
  parallel_for(points, threads, [&](std::size_t i) {
    values[i] =
        apply_generator(kernel, bf, point1(lo + dx * i), opts, &ws).value;
  });
  return GeneratorTable(lo, dx, std::move(values));
}

}  // namespace levylab
