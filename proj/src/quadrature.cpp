#include "levylab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace levylab {

namespace {

// 15-point Kronrod abscissae/weights with the embedded 7-point Gauss rule,
// for [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel eval_panel(const Integrand& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(mid - half * kXgk[i]);
    fv[14 - i] = f(mid + half * kXgk[i]);
  }
  fv[7] = f(mid);
  double kronrod = kWgk[7] * fv[7];
  double gauss = kWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    kronrod += kWgk[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) gauss += kWg[i / 2] * (fv[i] + fv[14 - i]);
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value = kronrod * half;
  const double diff = std::abs(kronrod - gauss) * half;
  // QUADPACK-style sharpening of the raw Gauss/Kronrod difference.
  double resasc = 0.0;
  for (int i = 0; i < 15; ++i) resasc += std::abs(fv[i]);
  resasc *= std::abs(half);
  double err = diff;
  if (resasc > 0.0 && diff > 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * diff / resasc, 1.5));
  }
  p.error = err;
  return p;
}

}  // namespace

QuadResult gk15_panel(const Integrand& f, double a, double b) {
  const Panel p = eval_panel(f, a, b);
  return {p.value, p.error, true, 15};
}

QuadResult integrate(const Integrand& f, double a, double b,
                     const QuadOptions& opts) {
  QuadResult out;
  if (a == b) return out;
  std::priority_queue<Panel> heap;
  Panel root = eval_panel(f, a, b);
  out.evaluations = 15;
  double total = root.value;
  double total_err = root.error;
  heap.push(root);
  const auto tolerance = [&](double v) {
    return std::max(opts.abs_tol, opts.rel_tol * std::abs(v));
  };
  double stuck_err = 0.0;
  while (total_err + stuck_err > tolerance(total) && !heap.empty() &&
         heap.size() < opts.max_intervals) {
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval at machine resolution; its estimate cannot improve.
      stuck_err += worst.error;
      total_err -= worst.error;
      continue;
    }
    Panel left = eval_panel(f, worst.a, mid);
    Panel right = eval_panel(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  total_err += stuck_err;
  out.value = total;
  out.error = total_err;
  out.converged = total_err <= tolerance(total) * 1.0001 + 1e-300;
  return out;
}

QuadResult integrate_to_zero(const Integrand& g, double r_hi,
                             const QuadOptions& opts, int max_shells) {
  QuadResult out;
  QuadOptions shell_opts = opts;
  double hi = r_hi;
  double prev_abs = -1.0;
  for (int k = 0; k < max_shells; ++k) {
    const double lo = 0.5 * hi;
    shell_opts.abs_tol = std::max(
        opts.abs_tol * 0.25, opts.rel_tol * std::abs(out.value) * 0.25);
    QuadResult shell = integrate(g, lo, hi, shell_opts);
    out += shell;
    const double mag = std::abs(shell.value);
    const double done_tol =
        std::max(opts.abs_tol, opts.rel_tol * std::abs(out.value));
    if (mag < 0.01 * done_tol && k > 2) {
      // Remaining shells are bounded by a geometric extrapolation.
      double ratio = prev_abs > 0.0 ? mag / prev_abs : 0.5;
      ratio = std::min(ratio, 0.9);
      out.error += mag * ratio / (1.0 - ratio);
      return out;
    }
    prev_abs = mag;
    hi = lo;
  }
  throw non_integrable_error(
      "shell contributions near 0 do not decay: integral diverges");
}

QuadResult integrate_to_infinity(const Integrand& g, double r_lo,
                                 const QuadOptions& opts, int max_shells) {
  QuadResult out;
  QuadOptions shell_opts = opts;
  double lo = r_lo;
  double prev_abs = -1.0;
  for (int k = 0; k < max_shells; ++k) {
    const double hi = 2.0 * lo;
    shell_opts.abs_tol = std::max(
        opts.abs_tol * 0.25, opts.rel_tol * std::abs(out.value) * 0.25);
    QuadResult shell = integrate(g, lo, hi, shell_opts);
    out += shell;
    const double mag = std::abs(shell.value);
    const double done_tol =
        std::max(opts.abs_tol, opts.rel_tol * std::abs(out.value));
    if (mag < 0.01 * done_tol && k > 1) {
      double ratio = prev_abs > 0.0 ? mag / prev_abs : 0.5;
      ratio = std::min(ratio, 0.9);
      out.error += mag * ratio / (1.0 - ratio);
      return out;
    }
    prev_abs = mag;
    lo = hi;
  }
  throw non_integrable_error(
      "shell contributions at infinity do not decay: integral diverges");
}

}  // namespace levylab
