#include "levylab/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace levylab {

namespace {

std::vector<Point> x_grid(int dim, const SampleSpec& spec) {
  std::vector<Point> grid;
  const int n = spec.x_per_axis;
  const double w = spec.box_halfwidth;
  if (dim == 1) {
    grid.reserve(n);
    for (int i = 0; i < n; ++i) {
      grid.push_back(point1(-w + 2.0 * w * i / (n - 1)));
    }
  } else {
    const int m = std::max(3, static_cast<int>(std::sqrt(double(n))) + 2);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        grid.push_back(point2(-w + 2.0 * w * i / (m - 1),
                              -w + 2.0 * w * j / (m - 1)));
      }
    }
  }
  return grid;
}

std::vector<Point> h_samples(int dim, double radius_lo, double radius_hi,
                             const SampleSpec& spec) {
  std::vector<Point> out;
  const double decades = std::log10(radius_hi / radius_lo);
  const int n_radii =
      std::max(8, static_cast<int>(std::ceil(decades * spec.h_per_decade)));
  std::vector<Point> dirs;
  if (dim == 1) {
    dirs.push_back(point1(1.0));
  } else {
    for (int a = 0; a < spec.angular_directions; ++a) {
      dirs.push_back(unit_direction(2, 2.0 * M_PI * a / spec.angular_directions));
    }
  }
  for (int i = 0; i <= n_radii; ++i) {
    const double r =
        radius_lo * std::pow(radius_hi / radius_lo, double(i) / n_radii);
    for (const auto& u : dirs) out.push_back(r * u);
  }
  return out;
}

struct PairTable {
  std::vector<double> separation;  // ||x-y|| per pair
  std::vector<double> weighted_sup;  // sup_h |A(x,h)-A(y,h)| psi(||h||)
};

// Shared machinery of the modulus-delta and xi estimates: sample pairs at
// log-spaced separations around grid points plus all grid-grid pairs, and
// record each pair's psi-weighted sup over the h grid.
PairTable build_pair_table(const StateKernel& kernel, double h_radius_hi,
                           const SampleSpec& spec) {
  const int dim = kernel.dim();
  const auto xs = x_grid(dim, spec);
  const auto hs = h_samples(dim, spec.h_radius_floor,
                            h_radius_hi - 1e-12 * h_radius_hi, spec);
  std::vector<double> psi_w(hs.size());
  for (std::size_t j = 0; j < hs.size(); ++j) {
    psi_w[j] = kernel.psi.psi(hs[j].norm());
  }

  const auto pair_sup = [&](const Point& x, const Point& y) {
    double sup = 0.0;
    for (std::size_t j = 0; j < hs.size(); ++j) {
      const double d = std::abs(kernel.A.A(x, hs[j]) - kernel.A.A(y, hs[j]));
      sup = std::max(sup, d * psi_w[j]);
    }
    return sup;
  };

  PairTable table;
  const double diam = 2.0 * spec.box_halfwidth * std::sqrt(double(dim));
  // log-spaced separations on both sides of each grid point
  for (const auto& x : xs) {
    for (int k = 0; k < spec.pair_separations; ++k) {
      const double t = spec.min_separation *
                       std::pow(diam / spec.min_separation,
                                double(k) / (spec.pair_separations - 1));
      for (double sign : {1.0, -1.0}) {
        Point y = x;
        y[0] += sign * t;
        table.separation.push_back(t);
        table.weighted_sup.push_back(pair_sup(x, y));
      }
    }
  }
  // all grid-grid pairs
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      table.separation.push_back((xs[i] - xs[j]).norm());
      table.weighted_sup.push_back(pair_sup(xs[i], xs[j]));
    }
  }
  return table;
}

double worst_below(const PairTable& t, double delta) {
  double sup = 0.0;
  for (std::size_t i = 0; i < t.separation.size(); ++i) {
    if (t.separation[i] < delta) sup = std::max(sup, t.weighted_sup[i]);
  }
  return sup;
}

}  // namespace

double estimate_modulus_delta(const StateKernel& kernel, double b, double eps,
                              const SampleSpec& spec) {
  if (!(b > 0.0) || !(eps > 0.0)) {
    throw std::domain_error("estimate_modulus_delta: b, eps must be > 0");
  }
  if (kernel.A.constant_in_x) {
    return 2.0 * spec.box_halfwidth * std::sqrt(double(kernel.dim()));
  }
  const PairTable table = build_pair_table(kernel, b, spec);
  const double ceiling =
      2.0 * spec.box_halfwidth * std::sqrt(double(kernel.dim()));
  if (worst_below(table, spec.delta_floor) >= eps) return 0.0;
  if (worst_below(table, ceiling) < eps) return ceiling;
  double lo = spec.delta_floor, hi = ceiling;
  for (int it = 0; it < 60; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (worst_below(table, mid) < eps) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double estimate_xi(const StateKernel& kernel, const SampleSpec& spec) {
  if (kernel.A.constant_in_x) return 0.0;
  const PairTable table = build_pair_table(kernel, spec.h_radius_cap, spec);
  double sup = 0.0;
  for (double v : table.weighted_sup) sup = std::max(sup, v);
  return sup;
}

AssumptionReport validate_assumptions(const StateKernel& kernel,
                                      const SampleSpec& spec) {
  AssumptionReport report;
  report.spec = spec;
  report.c1 = kernel.A.c1;
  report.c2 = kernel.A.c2;
  report.xi_declared = kernel.A.xi_declared;
  const int dim = kernel.dim();

  // (a) K0 finite
  {
    ClauseReport c;
    c.clause = "1a";
    try {
      double err = 0.0;
      report.k0 = compute_k0(kernel.J, &err);
      c.value = report.k0;
      c.error_estimate = err;
      c.verdict = (std::isfinite(report.k0) && err <= 0.01 * report.k0)
                      ? Verdict::pass
                      : Verdict::inconclusive;
    } catch (const non_integrable_error& e) {
      c.verdict = Verdict::fail;
      c.detail = e.what();
    }
    report.clauses.push_back(c);
  }

  // (b) symmetry of K(x, .)
  {
    ClauseReport c;
    c.clause = "1b";
    c.verdict = Verdict::pass;
    const auto xs = x_grid(dim, spec);
    const auto hs = h_samples(dim, 1e-6, 3.0, spec);
    for (const auto& x : xs) {
      for (const auto& h : hs) {
        if (kernel.eval(x, h) != kernel.eval(x, -h)) {
          c.verdict = Verdict::fail;
          c.detail = "K(x,h) != K(x,-h) at a sampled point";
          break;
        }
      }
      if (c.verdict == Verdict::fail) break;
    }
    report.clauses.push_back(c);
  }

  // (c) slowly varying sandwich profile with diverging L
  {
    ClauseReport c;
    c.clause = "1c";
    const auto sv = probe_slow_variation(kernel.J.profile);
    const auto dv = probe_divergence(kernel.J.profile);
    bool sandwich = true;
    const double kappa = kernel.J.profile.kappa;
    for (int k = 0; k <= 30; ++k) {
      const double r = std::ldexp(1.0, -k);
      const double model = kernel.J.profile.l(r) / std::pow(r, dim);
      const double j = kernel.J.radial(r);
      if (!(j >= model / kappa - 1e-300) || !(j <= model * kappa)) {
        sandwich = false;
        break;
      }
    }
    c.value = sv.ratios.empty() ? 0.0 : sv.ratios.back()[2];
    c.verdict = (sv.pass && dv.pass && sandwich) ? Verdict::pass : Verdict::fail;
    if (!sv.pass) c.detail = "slow-variation ratio probe failed";
    else if (!dv.pass) c.detail = "L(r) divergence probe failed";
    else if (!sandwich) c.detail = "sandwich bound violated";
    report.clauses.push_back(c);
  }

  // (d) c1 <= A <= c2
  {
    ClauseReport c;
    c.clause = "1d";
    c.verdict = Verdict::pass;
    const auto xs = x_grid(dim, spec);
    const auto hs = h_samples(dim, 1e-6, 3.0, spec);
    double lo = kernel.A.c2, hi = kernel.A.c1;
    for (const auto& x : xs) {
      for (const auto& h : hs) {
        const double a = kernel.A.A(x, h);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
        if (a < kernel.A.c1 - 1e-12 || a > kernel.A.c2 + 1e-12) {
          c.verdict = Verdict::fail;
          c.detail = "A outside [c1, c2] at a sampled point";
        }
      }
    }
    c.value = hi;
    report.clauses.push_back(c);
  }

  // (e)(i) psi == 1 beyond radius 1
  {
    ClauseReport c;
    c.clause = "1e-i";
    c.verdict = Verdict::pass;
    for (int i = 0; i <= 64; ++i) {
      const double s = 1.0 + i * 0.5;
      if (kernel.psi.psi(s) != 1.0) {
        c.verdict = Verdict::fail;
        c.detail = "psi(s) != 1 for s >= 1";
        break;
      }
    }
    report.clauses.push_back(c);
  }

  // (e)(ii) modulus-of-continuity delta exists for every (b, eps)
  {
    ClauseReport c;
    c.clause = "1e-ii";
    c.verdict = Verdict::pass;
    const double bs[] = {0.5, 1.0, 2.0};
    const double epss[] = {1.0, 0.25};
    for (double b : bs) {
      for (double eps : epss) {
        DeltaEntry entry;
        entry.b = b;
        entry.eps = eps;
        entry.delta = estimate_modulus_delta(kernel, b, eps, spec);
        report.delta_table.push_back(entry);
        if (entry.delta <= 0.0) {
          c.verdict = Verdict::fail;
          c.detail = "no delta above the floor for some (b, eps)";
        }
      }
    }
    report.clauses.push_back(c);
  }

  // (e)(iii) J/psi integrable
  {
    ClauseReport c;
    c.clause = "1e-iii";
    if (kernel.j_script_finite) {
      double err = 0.0;
      report.j_script = compute_j_script(kernel.J, kernel.psi, &err);
      c.value = report.j_script;
      c.error_estimate = err;
      c.verdict = err <= 0.01 * report.j_script ? Verdict::pass
                                                : Verdict::inconclusive;
    } else {
      c.verdict = Verdict::fail;
      c.detail = "integral of J/psi diverges";
    }
    report.clauses.push_back(c);
  }

  // Assumption 2: declared xi must dominate the grid estimate
  {
    ClauseReport c;
    c.clause = "2";
    report.xi_estimate = estimate_xi(kernel, spec);
    c.value = report.xi_estimate;
    if (kernel.A.xi_declared) {
      c.verdict = (*kernel.A.xi_declared >= report.xi_estimate * (1.0 - 1e-9))
                      ? Verdict::pass
                      : Verdict::fail;
    } else {
      c.verdict = Verdict::inconclusive;
      c.detail = "xi not declared; grid estimate reported as a lower bound";
    }
    report.clauses.push_back(c);
  }

  report.all_pass = true;
  for (const auto& c : report.clauses) {
    if (c.verdict != Verdict::pass) report.all_pass = false;
  }
  return report;
}

StateKernel localize_kernel_auto(const StateKernel& kernel, const Point& x0,
                                 const SampleSpec& spec, double* eta_out) {
  const double delta = estimate_modulus_delta(kernel, 1.0, 1.0, spec);
  if (delta <= 0.0) {
    throw localization_error(
        "localize_kernel: modulus search found no delta above the floor");
  }
  const double eta = 0.5 * delta;
  if (eta_out) *eta_out = eta;
  return localize_kernel(kernel, x0, eta);
}

}  // namespace levylab
