#pragma once

#include <cstddef>
#include <functional>

#include "levylab/types.hpp"

namespace levylab {

using Integrand = std::function<double(double)>;

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  std::size_t evaluations = 0;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    error += o.error;
    converged = converged && o.converged;
    evaluations += o.evaluations;
    return *this;
  }
};

struct QuadOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  std::size_t max_intervals = 4000;
};

// Globally adaptive 15-point Gauss-Kronrod on [a, b].
QuadResult integrate(const Integrand& f, double a, double b,
                     const QuadOptions& opts = {});

// Non-adaptive GK15 estimate of a single panel.
QuadResult gk15_panel(const Integrand& f, double a, double b);

// Integral of g over (0, r_hi] taken as a sweep of dyadic shells
// [r_hi 2^{-k-1}, r_hi 2^{-k}].  Throws non_integrable_error when the shell
// contributions fail to decay (the integral diverges at the origin).
QuadResult integrate_to_zero(const Integrand& g, double r_hi,
                             const QuadOptions& opts = {},
                             int max_shells = 160);

// Integral of g over [r_lo, inf) by doubling shells; throws
// non_integrable_error when the shell contributions fail to decay.
QuadResult integrate_to_infinity(const Integrand& g, double r_lo,
                                 const QuadOptions& opts = {},
                                 int max_shells = 160);

}  // namespace levylab
