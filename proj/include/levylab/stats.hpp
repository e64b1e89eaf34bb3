#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace levylab {

// Pairwise (tree) summation over a fixed index order. Independent of thread
// count because callers deposit per-item values by index first.
inline double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

inline MeanStderr mean_stderr(std::span<const double> v) {
  MeanStderr out;
  out.n = v.size();
  if (out.n == 0) return out;
  out.mean = pairwise_sum(v) / static_cast<double>(out.n);
  if (out.n < 2) return out;
  std::vector<double> sq(out.n);
  for (std::size_t i = 0; i < out.n; ++i) {
    const double d = v[i] - out.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(out.n - 1);
  out.stderr_ = std::sqrt(var / static_cast<double>(out.n));
  return out;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;
  std::size_t n = 0;
};

inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  LinearFit fit;
  fit.n = x.size();
  if (fit.n < 2) return fit;
  const double n = static_cast<double>(fit.n);
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    sse += r * r;
  }
  fit.r_squared = (syy > 0) ? 1.0 - sse / syy : 1.0;
  if (fit.n > 2) fit.slope_stderr = std::sqrt(sse / (n - 2.0) / sxx);
  return fit;
}

// One-sided 95% critical values of Student's t for small residual dof.
inline double t_critical_95(std::size_t dof) {
  static const double table[] = {0.0,   6.314, 2.920, 2.353, 2.132, 2.015,
                                 1.943, 1.895, 1.860, 1.833, 1.812};
  if (dof == 0) return 6.314;
  if (dof <= 10) return table[dof];
  if (dof <= 20) return 1.725;
  return 1.645;
}

}  // namespace levylab
