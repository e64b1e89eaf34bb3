#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "levylab/radial_profile.hpp"
#include "levylab/types.hpp"

namespace levylab {

// Surface measure of the unit sphere in R^d, d in {1,2}.
inline double sphere_surface(int dim) {
  return dim == 1 ? 2.0 : 2.0 * M_PI;
}

// Isotropic Levy density J(h) = j(||h||) with small-ball profile l(r)/r^d
// and an integrable radial tail on [1, inf).
struct JumpDensity {
  int dim = 1;
  RadialProfile profile;
  std::function<double(double)> tail;  // radial density for r >= 1
  double k0 = 0.0;                     // cached \int (1 ^ ||h||^2) J
  std::string tag;
  bool symmetric = true;

  double radial(double r) const {
    if (!(r > 0.0)) throw std::domain_error("JumpDensity: radius must be > 0");
    if (r <= 1.0) return profile.l(r) / std::pow(r, dim);
    return tail(r);
  }

  double operator()(const Point& h) const { return radial(h.norm()); }
};

struct ModulusFunction {
  std::function<double(double)> psi;
  std::string tag;
  double eps = 0.0;  // exponent for the reciprocal family, 0 otherwise
};

// The state-dependent coefficient A(x,h) with its global bounds. xi_declared
// carries an analytic uniform-modulus constant when one is known.
struct Perturbation {
  std::function<double(const Point& x, const Point& h)> A;
  double c1 = 1.0;
  double c2 = 1.0;
  std::optional<double> xi_declared;
  std::string family_tag;
  bool radial_in_h = true;    // A(x,h) depends on h through ||h|| only
  bool constant_in_x = false;
};

struct StateKernel {
  JumpDensity J;
  Perturbation A;
  ModulusFunction psi;
  double j_script = 0.0;  // cached \int J/psi (0 when the integral diverges)
  bool j_script_finite = false;

  int dim() const { return J.dim; }

  double eval(const Point& x, const Point& h) const {
    const double r = h.norm();
    if (!(r > 0.0)) throw std::domain_error("StateKernel: h must be nonzero");
    return A.A(x, h) * J.radial(r);
  }
};

double compute_k0(const JumpDensity& J, double* error_estimate = nullptr);

// \int_{R^d} J(h)/psi(||h||) dh; throws non_integrable_error on divergence.
double compute_j_script(const JumpDensity& J, const ModulusFunction& psi,
                        double* error_estimate = nullptr);

// Ball part \int_{||h||<1} J/psi only (the analytically pinned piece).
double j_script_inner(const JumpDensity& J, const ModulusFunction& psi,
                      double* error_estimate = nullptr);

// A(x,h) frozen radially outside B(x0,eta): outside the ball the first
// argument is replaced by the projection x0 + eta (x-x0)/||x-x0||.
StateKernel localize_kernel(const StateKernel& kernel, const Point& x0,
                            double eta);

JumpDensity make_jump_density(int dim, const RadialProfile& profile,
                              const std::string& tail_tag = "exp");
JumpDensity make_zero_jump_density(int dim);

ModulusFunction make_modulus(const std::string& tag, double eps = 0.5);

Perturbation make_perturbation(const std::string& family, int dim,
                               double eps = 0.5, double c1 = 0.5,
                               double c2 = 2.0);

StateKernel make_state_kernel(const JumpDensity& J, const Perturbation& A,
                              const ModulusFunction& psi);

// Presets: "gs-like", "log-profile", "example", "stable-like".
StateKernel make_preset_kernel(const std::string& name, int dim,
                               double eps = 0.5);

}  // namespace levylab
