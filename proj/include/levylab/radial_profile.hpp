#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "levylab/quadrature.hpp"
#include "levylab/types.hpp"

namespace levylab {

// The slowly varying small-ball profile l : (0,1) -> (0,inf) together with
// the two-sided comparison constant kappa of the sandwich bound
// kappa^{-1} l(r)/r^d <= j(r) <= kappa l(r)/r^d.
struct RadialProfile {
  std::function<double(double)> l;
  double kappa = 1.5;
  std::string tag;
  bool divergence_checked = false;
};

// L(r) = \int_r^1 l(s)/s ds, relative error <= 1e-8.
double big_l(const RadialProfile& profile, double r);

struct SlowVariationProbe {
  // rows: (s, l(2s)/l(s), l(10s)/l(s)) on a decreasing grid
  std::vector<std::array<double, 3>> ratios;
  bool pass = false;
};

// Checks l(c s)/l(s) -> 1 (c in {2,10}) on s = 2^{-k}; the ratios at the
// smallest sampled s must lie within 1 +- 0.05. Logarithmic profiles
// approach 1 slowly, hence the deep default grid.
SlowVariationProbe probe_slow_variation(const RadialProfile& profile,
                                        int max_k = 120);

struct DivergenceProbe {
  std::vector<double> big_l_values;  // L(2^{-k}), k = 1..max_k
  bool monotone = false;
  bool unbounded = false;
  bool pass = false;
};

// L(2^{-k}) must increase strictly in k and keep growing (the presets with
// integrable l/s fail the growth test).
DivergenceProbe probe_divergence(const RadialProfile& profile, int max_k = 40);

RadialProfile constant_profile();
RadialProfile log_profile();
// l(s) = s^{-alpha}; not slowly varying for alpha != 0 (negative control).
RadialProfile power_profile(double alpha);

}  // namespace levylab
