#include "levylab/frozen.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "levylab/quadrature.hpp"

namespace levylab {

namespace {

QuadOptions symbol_opts() {
  QuadOptions o;
  o.abs_tol = 1e-11;
  o.rel_tol = 1e-9;
  o.max_intervals = 20000;
  return o;
}

// Radial section of the frozen kernel: A(x0, r e1) j(r). All presets have
// A radial in h, so one direction represents the angle average.
std::function<double(double)> radial_section(const StateKernel& base,
                                             const Point& x0) {
  if (base.dim() == 1) {
    return [&base, x0](double r) {
      const Point hp = point1(r), hm = point1(-r);
      return 0.5 * (base.A.A(x0, hp) + base.A.A(x0, hm)) * base.J.radial(r);
    };
  }
  if (!base.A.radial_in_h) {
    // angle-averaged coefficient, 128-point trapezoid (A smooth in angle)
    return [&base, x0](double r) {
      double sum = 0.0;
      const int m = 128;
      for (int a = 0; a < m; ++a) {
        sum += base.A.A(x0, r * unit_direction(2, 2.0 * M_PI * a / m));
      }
      return sum / m * base.J.radial(r);
    };
  }
  return [&base, x0](double r) {
    return base.A.A(x0, point2(r, 0.0)) * base.J.radial(r);
  };
}

double c2_tail_mass(const StateKernel& base, double radius) {
  QuadOptions o;
  o.rel_tol = 1e-6;
  o.abs_tol = 1e-16;
  const int d = base.dim();
  const auto g = [&](double r) { return std::pow(r, d - 1) * base.J.radial(r); };
  QuadResult q = integrate_to_infinity(g, radius, o);
  return base.A.c2 * sphere_surface(d) * (q.value + q.error);
}

double c2_ball_h2_mass(const StateKernel& base, double radius) {
  QuadOptions o;
  o.rel_tol = 1e-6;
  o.abs_tol = 1e-60;
  const int d = base.dim();
  const auto g = [&](double r) { return std::pow(r, d + 1) * base.J.radial(r); };
  QuadResult q = integrate_to_zero(g, radius, o);
  return base.A.c2 * sphere_surface(d) * (q.value + q.error);
}

}  // namespace

StateKernel freeze_at(const StateKernel& kernel, const Point& x0) {
  StateKernel out = kernel;
  const auto base = kernel.A.A;
  const Point center = x0;
  out.A.A = [base, center](const Point&, const Point& h) {
    return base(center, h);
  };
  out.A.family_tag = kernel.A.family_tag + "-frozen";
  out.A.constant_in_x = true;
  out.A.xi_declared = 0.0;
  return out;
}

double JumpSampler::sample_radius(double u) const {
  if (radii.empty()) return eps_cut;
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.begin()) return radii.front();
  if (it == cdf.end()) return radii.back();
  const std::size_t i = static_cast<std::size_t>(it - cdf.begin());
  const double c0 = cdf[i - 1], c1 = cdf[i];
  const double t = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
  return radii[i - 1] + t * (radii[i] - radii[i - 1]);
}

std::shared_ptr<const JumpSampler> build_jump_sampler(const JumpDensity& J,
                                                      double eps_cut,
                                                      int knots) {
  auto sampler = std::make_shared<JumpSampler>();
  sampler->eps_cut = eps_cut;
  const int d = J.dim;
  const double surf = sphere_surface(d);
  const auto radial_mass = [&](double r) {
    return std::pow(r, d - 1) * J.radial(r);
  };

  QuadOptions o;
  o.rel_tol = 1e-10;
  o.abs_tol = 1e-16;
  QuadResult to_one =
      eps_cut < 1.0 ? integrate(radial_mass, eps_cut, 1.0, o) : QuadResult{};
  QuadResult beyond = integrate_to_infinity(radial_mass, std::max(1.0, eps_cut), o);
  const double total = surf * (to_one.value + beyond.value);
  sampler->total_mass = total;
  if (!(total > 0.0)) return sampler;  // degenerate density: no jumps

  // Knot range: cap where the remaining tail is below 1e-12 of the total.
  double r_top = std::max(2.0, 2.0 * eps_cut);
  while (surf * integrate_to_infinity(radial_mass, r_top, o).value >
         1e-12 * total) {
    r_top *= 2.0;
    if (r_top > 1e9) break;
  }

  sampler->radii.resize(knots);
  sampler->cdf.resize(knots);
  const double lr0 = std::log(eps_cut), lr1 = std::log(r_top);
  double acc = 0.0;
  sampler->radii[0] = eps_cut;
  sampler->cdf[0] = 0.0;
  for (int i = 1; i < knots; ++i) {
    const double r_prev = std::exp(lr0 + (lr1 - lr0) * (i - 1) / (knots - 1));
    const double r_here = std::exp(lr0 + (lr1 - lr0) * i / (knots - 1));
    acc += gk15_panel(radial_mass, r_prev, r_here).value;
    sampler->radii[i] = r_here;
    sampler->cdf[i] = acc;
  }
  const double norm = sampler->cdf.back();
  for (double& c : sampler->cdf) c /= norm;
  return sampler;
}

FrozenKernel::FrozenKernel(const StateKernel& base, Point x0)
    : base_(base), x0_(std::move(x0)) {}

double FrozenKernel::symbol_radial(double xi_norm) const {
  xi_norm = std::abs(xi_norm);
  if (xi_norm == 0.0) return 0.0;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = symbol_cache_.find(xi_norm);
    if (it != symbol_cache_.end()) return it->second;
  }

  const int d = dim();
  const auto section = radial_section(base_, x0_);
  const auto integrand = [&](double r) {
    if (d == 1) {
      const double s = std::sin(0.5 * xi_norm * r);
      return 4.0 * s * s * section(r);
    }
    return 2.0 * M_PI * (1.0 - std::cyl_bessel_j(0.0, xi_norm * r)) *
           section(r) * r;
  };

  const double r_min = 0x1p-30;
  QuadOptions o = symbol_opts();
  const auto log_integrand = [&](double t) {
    const double r = std::exp(t);
    return integrand(r) * r;
  };
  QuadResult inner = integrate(log_integrand, std::log(r_min), 0.0, o);
  double value = inner.value;
  double lo = 1.0;
  for (int oct = 0; oct < 60; ++oct) {
    const double hi = 2.0 * lo;
    value += integrate(integrand, lo, hi, o).value;
    lo = hi;
    if (2.0 * c2_tail_mass(base_, lo) <= 1e-11 * (1.0 + value)) break;
  }
  // sub-r_min contribution is below (xi^2/2) c2 \int_{<r_min} ||h||^2 J
  value = std::max(0.0, value);

  std::lock_guard<std::mutex> lock(mutex_);
  auto [it, inserted] = symbol_cache_.emplace(xi_norm, value);
  return it->second;
}

double FrozenKernel::eval_symbol(const Point& xi) const {
  const double norm = xi.norm();
  if (norm == 0.0) return 0.0;
  if (base_.A.radial_in_h || dim() == 1) return symbol_radial(norm);
  // Anisotropic coefficient: fall back to generator duality, phi(xi) =
  // -(L cos(xi.x))(0) for the frozen kernel.
  TestFunctionParams p;
  p.freq = xi;
  const TestFunction cosine = make_test_function("cosine", dim(), p);
  const StateKernel frozen = freeze_at(base_, x0_);
  GeneratorOptions go;
  go.tol = 1e-9;
  return std::max(0.0, -apply_generator(frozen, cosine, zero_point(dim()), go).value);
}

double FrozenKernel::truncated_symbol(const Point& xi, double eps) const {
  const double xi_norm = xi.norm();
  if (xi_norm == 0.0) return 0.0;
  const int d = dim();
  const auto section = radial_section(base_, x0_);
  const auto integrand = [&](double r) {
    if (d == 1) {
      const double s = std::sin(0.5 * xi_norm * r);
      return 4.0 * s * s * section(r);
    }
    return 2.0 * M_PI * (1.0 - std::cyl_bessel_j(0.0, xi_norm * r)) *
           section(r) * r;
  };
  QuadOptions o = symbol_opts();
  double value = 0.0;
  double lo = eps;
  for (int oct = 0; oct < 80; ++oct) {
    const double hi = 2.0 * lo;
    value += integrate(integrand, lo, hi, o).value;
    lo = hi;
    if (lo >= 1.0 && 2.0 * c2_tail_mass(base_, lo) <= 1e-11 * (1.0 + value)) {
      break;
    }
  }
  return std::max(0.0, value);
}

double FrozenKernel::jump_intensity(double eps) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = intensity_cache_.find(eps);
    if (it != intensity_cache_.end()) return it->second;
  }
  const int d = dim();
  const auto section = radial_section(base_, x0_);
  const auto integrand = [&](double r) {
    return std::pow(r, d - 1) * section(r);
  };
  QuadOptions o;
  o.rel_tol = 1e-10;
  o.abs_tol = 1e-14;
  double value = 0.0;
  if (eps < 1.0) value += integrate(integrand, eps, 1.0, o).value;
  value += integrate_to_infinity(integrand, std::max(1.0, eps), o).value;
  value *= sphere_surface(d);
  std::lock_guard<std::mutex> lock(mutex_);
  auto [it, inserted] = intensity_cache_.emplace(eps, value);
  return it->second;
}

double FrozenKernel::small_jump_sigma2(double eps) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = sigma2_cache_.find(eps);
    if (it != sigma2_cache_.end()) return it->second;
  }
  const int d = dim();
  const auto section = radial_section(base_, x0_);
  const auto integrand = [&](double r) {
    return std::pow(r, d + 1) * section(r);
  };
  QuadOptions o;
  o.rel_tol = 1e-9;
  o.abs_tol = 1e-60;
  const double value =
      sphere_surface(d) * integrate_to_zero(integrand, eps, o).value / d;
  std::lock_guard<std::mutex> lock(mutex_);
  auto [it, inserted] = sigma2_cache_.emplace(eps, value);
  return it->second;
}

std::shared_ptr<const JumpSampler> FrozenKernel::sampler(double eps) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = samplers_.find(eps);
    if (it != samplers_.end()) return it->second;
  }
  auto built = build_jump_sampler(base_.J, eps);
  std::lock_guard<std::mutex> lock(mutex_);
  auto [it, inserted] = samplers_.emplace(eps, std::move(built));
  return it->second;
}

Point FrozenKernel::sample_increment(double dt, double eps_cut, RngStream& rng,
                                     bool gaussian_correction) const {
  if (!(dt > 0.0)) throw std::domain_error("sample_increment: dt must be > 0");
  if (!(eps_cut > 0.0) || !(eps_cut < 1.0)) {
    throw std::domain_error("sample_increment: eps_cut must lie in (0,1)");
  }
  const int d = dim();
  const auto s = sampler(eps_cut);
  const double c2 = base_.A.c2;
  Point incr = zero_point(d);
  const std::uint64_t candidates = rng.poisson(dt * c2 * s->total_mass);
  for (std::uint64_t i = 0; i < candidates; ++i) {
    const double r = s->sample_radius(rng.uniform());
    Point h;
    if (d == 1) {
      h = point1(rng.uniform() < 0.5 ? -r : r);
    } else {
      const double th = 2.0 * M_PI * rng.uniform();
      h = point2(r * std::cos(th), r * std::sin(th));
    }
    const double a = base_.A.A(x0_, h);
    if (a > c2 * (1.0 + 1e-9)) {
      throw std::runtime_error(
          "sample_increment: A(x0,h) exceeds the c2 envelope");
    }
    if (rng.uniform() * c2 < a) incr += h;
  }
  if (gaussian_correction) {
    const double sigma = std::sqrt(dt * small_jump_sigma2(eps_cut));
    for (int i = 0; i < d; ++i) incr[i] += sigma * rng.normal();
  }
  return incr;
}

double ResolventField::value_at(const Point& x) const {
  if (dim == 1) {
    // incremental rotation over the signed-frequency ladder
    const double x0 = x[0];
    const int n = static_cast<int>(coeffs.size());
    const double base_freq = -freq_step * (n / 2);
    std::complex<double> z = std::polar(1.0, base_freq * x0);
    const std::complex<double> w = std::polar(1.0, freq_step * x0);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += (coeffs[i] * z).real();
      z *= w;
    }
    return acc;
  }
  // d = 2: periodic bicubic interpolation on the grid
  const int n = n_per_axis;
  const double step = 2.0 * box_halfwidth / n;
  const auto wrap = [n](int i) { return ((i % n) + n) % n; };
  const auto catmull = [](double p0, double p1, double p2, double p3, double t) {
    return p1 + 0.5 * t *
                    (p2 - p0 +
                     t * (2 * p0 - 5 * p1 + 4 * p2 - p3 +
                          t * (3 * (p1 - p2) + p3 - p0)));
  };
  const double gx = (x[0] + box_halfwidth) / step;
  const double gy = (x[1] + box_halfwidth) / step;
  const int ix = static_cast<int>(std::floor(gx));
  const int iy = static_cast<int>(std::floor(gy));
  const double tx = gx - ix, ty = gy - iy;
  double rows[4];
  for (int a = -1; a <= 2; ++a) {
    double p[4];
    for (int b = -1; b <= 2; ++b) {
      p[b + 1] = values[wrap(ix + a) * n + wrap(iy + b)];
    }
    rows[a + 1] = catmull(p[0], p[1], p[2], p[3], ty);
  }
  return catmull(rows[0], rows[1], rows[2], rows[3], tx);
}

double ResolventField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double ResolventField::sup_bound() const {
  double s = 0.0;
  for (const auto& c : coeffs) s += std::abs(c);
  return s;
}

double ResolventField::hessian_bound() const {
  double s = 0.0;
  const int n = static_cast<int>(coeffs.size());
  for (int i = 0; i < n; ++i) {
    const double xi = freq_step * (i - n / 2);
    s += xi * xi * std::abs(coeffs[i]);
  }
  return s;
}

ResolventField resolvent_fft(const FrozenKernel& fk,
                             const std::function<double(const Point&)>& g,
                             double lambda, const ResolventOptions& opts) {
  if (!(lambda > 0.0)) {
    throw std::domain_error("resolvent_fft: lambda must be > 0");
  }
  const int d = fk.dim();
  const int n = opts.n_per_axis;
  const double R = opts.box_halfwidth;

  ResolventField field;
  field.dim = d;
  field.lambda = lambda;
  field.box_halfwidth = R;
  field.n_per_axis = n;
  field.freq_step = M_PI / R;

  Eigen::FFT<double> fft;

  if (d == 1) {
    std::vector<std::complex<double>> spectrum(n), u_hat(n), u_cplx(n);
    std::vector<double> samples(n);
    double gmax = 0.0;
    for (int i = 0; i < n; ++i) {
      samples[i] = g(point1(field.grid_coord(i)));
      gmax = std::max(gmax, std::abs(samples[i]));
    }
    field.grid_max_abs_g = gmax;
    fft.fwd(spectrum, samples);
    for (int k = 0; k < n; ++k) {
      const int ks = k <= n / 2 ? k : k - n;
      const double phi = fk.symbol_radial(field.freq_step * std::abs(ks));
      u_hat[k] = spectrum[k] / (lambda + phi);
    }
    fft.inv(u_cplx, u_hat);
    field.values.resize(n);
    for (int i = 0; i < n; ++i) field.values[i] = u_cplx[i].real();
    field.coeffs.resize(n);
    for (int i = 0; i < n; ++i) {
      const int ks = i - n / 2;
      const int k = (ks + n) % n;
      const double xi = field.freq_step * ks;
      field.coeffs[i] = u_hat[k] * std::polar(1.0 / n, xi * R);
    }
  } else {
    std::vector<std::complex<double>> spectrum(
        static_cast<std::size_t>(n) * n);
    double gmax = 0.0;
    {
      std::vector<double> row(n);
      std::vector<std::complex<double>> row_hat(n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          row[j] = g(point2(field.grid_coord(i), field.grid_coord(j)));
          gmax = std::max(gmax, std::abs(row[j]));
        }
        fft.fwd(row_hat, row);
        for (int j = 0; j < n; ++j) spectrum[i * n + j] = row_hat[j];
      }
      std::vector<std::complex<double>> col(n), col_hat(n);
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) col[i] = spectrum[i * n + j];
        fft.fwd(col_hat, col);
        for (int i = 0; i < n; ++i) spectrum[i * n + j] = col_hat[i];
      }
    }
    field.grid_max_abs_g = gmax;
    for (int i = 0; i < n; ++i) {
      const int ki = i <= n / 2 ? i : i - n;
      for (int j = 0; j < n; ++j) {
        const int kj = j <= n / 2 ? j : j - n;
        const double norm =
            field.freq_step * std::sqrt(double(ki) * ki + double(kj) * kj);
        spectrum[i * n + j] /= (lambda + fk.symbol_radial(norm));
      }
    }
    // inverse 2-d transform
    {
      std::vector<std::complex<double>> col(n), col_out(n);
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) col[i] = spectrum[i * n + j];
        fft.inv(col_out, col);
        for (int i = 0; i < n; ++i) spectrum[i * n + j] = col_out[i];
      }
      std::vector<std::complex<double>> row(n), row_out(n);
      field.values.resize(static_cast<std::size_t>(n) * n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) row[j] = spectrum[i * n + j];
        fft.inv(row_out, row);
        for (int j = 0; j < n; ++j) {
          field.values[i * n + j] = row_out[j].real();
        }
      }
    }
  }

  // Residual |lambda u - L^{x0} u - g| on a subsample of grid points, with
  // L^{x0}u from the generator quadrature applied to the interpolant.
  if (opts.residual_probes > 0) {
    const StateKernel frozen = freeze_at(fk.base(), fk.x0());
    GeneratorWorkspace ws;
    BoundedFn u_fn;
    const ResolventField* fp = &field;
    u_fn.f = [fp](const Point& x) { return fp->value_at(x); };
    u_fn.sup_norm = d == 1 ? field.sup_bound() : field.max_abs() * 1.5;
    u_fn.hessian_bound =
        d == 1 ? field.hessian_bound()
               : field.max_abs() * (lambda + 1.0);  // coarse but finite
    double worst = 0.0;
    for (int p = 0; p < opts.residual_probes; ++p) {
      const int stride = std::max(1, n / opts.residual_probes);
      const int idx = (p * stride + stride / 2) % n;
      const double shift =
          opts.residual_at_midpoints ? R / double(n) : 0.0;
      Point x = d == 1 ? point1(field.grid_coord(idx) + shift)
                       : point2(field.grid_coord(idx) + shift,
                                field.grid_coord((idx * 7 + n / 3) % n));
      const double u_here = field.value_at(x);
      const double g_here = g(x);
      const GeneratorEval lu =
          apply_generator(frozen, u_fn, x, opts.generator, &ws);
      worst = std::max(worst,
                       std::abs(lambda * u_here - lu.value - g_here));
    }
    field.residual_sup = worst;
    field.residual_flagged =
        worst > opts.residual_tol_factor * field.grid_max_abs_g;
  }
  return field;
}

}  // namespace levylab
