#pragma once

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "levylab/generator.hpp"
#include "levylab/kernel.hpp"
#include "levylab/rng.hpp"

namespace levylab {

// The kernel with its coefficient frozen at x0; generates a genuine Levy
// process. A(x,h) -> A(x0,h), so the result is constant in x.
StateKernel freeze_at(const StateKernel& kernel, const Point& x0);

// Candidate tables for jump sampling, built from the c2 J envelope: radial
// cumulative intensity on log knots, inverted per draw. x0-independent.
struct JumpSampler {
  double eps_cut = 0.0;
  double total_mass = 0.0;             // \int_{||h||>=eps} J
  std::vector<double> radii;           // log-spaced knots
  std::vector<double> cdf;             // normalized cumulative mass
  double sample_radius(double u) const;
};

std::shared_ptr<const JumpSampler> build_jump_sampler(const JumpDensity& J,
                                                      double eps_cut,
                                                      int knots = 4096);

class FrozenKernel {
 public:
  FrozenKernel(const StateKernel& base, Point x0);

  const StateKernel& base() const { return base_; }
  const Point& x0() const { return x0_; }
  int dim() const { return base_.dim(); }

  // Levy exponent phi(xi) = \int (1 - cos(xi.h)) K(x0,h) dh, cached per
  // frequency; write-once concurrent fill.
  double eval_symbol(const Point& xi) const;
  double symbol_radial(double xi_norm) const;

  // eps-truncated exponent \int_{||h||>=eps} (1-cos) K(x0,h) dh.
  double truncated_symbol(const Point& xi, double eps) const;

  // Lambda(eps) = \int_{||h||>=eps} K(x0,h) dh.
  double jump_intensity(double eps) const;

  // d^{-1} \int_{||h||<eps} ||h||^2 K(x0,h) dh (per-component variance rate).
  double small_jump_sigma2(double eps) const;

  std::shared_ptr<const JumpSampler> sampler(double eps) const;

  // One increment over dt: Poisson-thinned compound jumps from the c2 J
  // envelope (law identical to drawing Poisson(dt Lambda(eps)) jumps from
  // the normalized frozen kernel) plus the matched-variance Gaussian.
  Point sample_increment(double dt, double eps_cut, RngStream& rng,
                         bool gaussian_correction = true) const;

 private:
  StateKernel base_;
  Point x0_;
  mutable std::mutex mutex_;
  mutable std::map<double, double> symbol_cache_;   // by |xi| (isotropic)
  mutable std::map<double, double> sigma2_cache_;   // by eps
  mutable std::map<double, double> intensity_cache_;  // by eps
  mutable std::map<double, std::shared_ptr<const JumpSampler>> samplers_;
};

// Periodic-grid resolvent of the frozen operator. d=1 keeps the spectral
// coefficients for off-grid evaluation; d=2 interpolates bicubically.
struct ResolventField {
  int dim = 1;
  double lambda = 1.0;
  double box_halfwidth = 64.0;
  int n_per_axis = 4096;
  std::vector<double> values;  // row-major for d=2
  double residual_sup = 0.0;
  bool residual_flagged = false;
  double grid_max_abs_g = 0.0;

  std::vector<std::complex<double>> coeffs;  // signed-frequency order (d=1)
  double freq_step = 0.0;

  double grid_coord(int i) const {
    return -box_halfwidth + 2.0 * box_halfwidth * i / n_per_axis;
  }
  double value_at(const Point& x) const;
  double max_abs() const;
  double sup_bound() const;      // sum |coeffs|: rigorous for the interpolant
  double hessian_bound() const;  // sum ||xi||^2 |coeffs|
};

struct ResolventOptions {
  double box_halfwidth = 64.0;
  int n_per_axis = 4096;
  int residual_probes = 32;
  double residual_tol_factor = 1e-3;  // flag when residual > factor * max|g|
  bool residual_at_midpoints = false;  // probe between nodes (mesh studies)
  GeneratorOptions generator;
};

ResolventField resolvent_fft(const FrozenKernel& fk,
                             const std::function<double(const Point&)>& g,
                             double lambda, const ResolventOptions& opts = {});

}  // namespace levylab
