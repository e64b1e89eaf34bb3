#include "levylab/kernel.hpp"

#include <cmath>

#include "levylab/quadrature.hpp"

namespace levylab {

namespace {

QuadOptions tight_opts() {
  QuadOptions opts;
  opts.rel_tol = 1e-9;
  opts.abs_tol = 1e-14;
  return opts;
}

}  // namespace

double compute_k0(const JumpDensity& J, double* error_estimate) {
  const double surf = sphere_surface(J.dim);
  const int d = J.dim;
  const auto inner = [&](double r) {
    return std::pow(r, d + 1) * J.radial(r);  // r^2 weight, polar jacobian
  };
  const auto outer = [&](double r) { return std::pow(r, d - 1) * J.radial(r); };
  QuadResult qi = integrate_to_zero(inner, 1.0, tight_opts());
  QuadResult qo = integrate_to_infinity(outer, 1.0, tight_opts());
  if (error_estimate) *error_estimate = surf * (qi.error + qo.error);
  return surf * (qi.value + qo.value);
}

double j_script_inner(const JumpDensity& J, const ModulusFunction& psi,
                      double* error_estimate) {
  const double surf = sphere_surface(J.dim);
  const int d = J.dim;
  const auto inner = [&](double r) {
    return std::pow(r, d - 1) * J.radial(r) / psi.psi(r);
  };
  QuadResult qi = integrate_to_zero(inner, 1.0, tight_opts());
  if (error_estimate) *error_estimate = surf * qi.error;
  return surf * qi.value;
}

double compute_j_script(const JumpDensity& J, const ModulusFunction& psi,
                        double* error_estimate) {
  const double surf = sphere_surface(J.dim);
  const int d = J.dim;
  double inner_err = 0.0;
  const double inner = j_script_inner(J, psi, &inner_err);
  const auto outer = [&](double r) {
    return std::pow(r, d - 1) * J.radial(r) / psi.psi(r);
  };
  QuadResult qo = integrate_to_infinity(outer, 1.0, tight_opts());
  if (error_estimate) *error_estimate = inner_err + surf * qo.error;
  return inner + surf * qo.value;
}

StateKernel localize_kernel(const StateKernel& kernel, const Point& x0,
                            double eta) {
  if (!(eta > 0.0)) {
    throw localization_error("localize_kernel: eta must be > 0");
  }
  StateKernel out = kernel;
  const auto base = kernel.A.A;
  const Point center = x0;
  out.A.A = [base, center, eta](const Point& x, const Point& h) {
    const Point dx = x - center;
    const double dist = dx.norm();
    if (dist < eta) return base(x, h);
    const Point projected = center + (eta / dist) * dx;
    return base(projected, h);
  };
  out.A.family_tag = kernel.A.family_tag + "-localized";
  out.A.constant_in_x = kernel.A.constant_in_x;
  return out;
}

JumpDensity make_jump_density(int dim, const RadialProfile& profile,
                              const std::string& tail_tag) {
  if (dim != 1 && dim != 2) {
    throw std::domain_error("JumpDensity: dim must be 1 or 2");
  }
  JumpDensity J;
  J.dim = dim;
  J.profile = profile;
  if (tail_tag == "exp") {
    J.tail = [dim](double r) {
      return std::exp(-(r - 1.0)) / std::pow(r, dim);
    };
  } else if (tail_tag == "zero") {
    J.tail = [](double) { return 0.0; };
  } else {
    throw std::domain_error("JumpDensity: unknown tail '" + tail_tag + "'");
  }
  J.tag = profile.tag + "+" + tail_tag;
  J.k0 = compute_k0(J);
  return J;
}

JumpDensity make_zero_jump_density(int dim) {
  JumpDensity J;
  J.dim = dim;
  J.profile.l = [](double) { return 0.0; };
  J.profile.tag = "zero";
  J.tail = [](double) { return 0.0; };
  J.tag = "zero";
  J.k0 = 0.0;
  return J;
}

ModulusFunction make_modulus(const std::string& tag, double eps) {
  ModulusFunction m;
  m.tag = tag;
  if (tag == "reciprocal") {
    m.eps = eps;
    m.psi = [eps](double s) {
      return s >= 1.0 ? 1.0 : std::pow(s, -eps);
    };
  } else if (tag == "one") {
    m.psi = [](double) { return 1.0; };
  } else {
    throw std::domain_error("ModulusFunction: unknown tag '" + tag + "'");
  }
  return m;
}

Perturbation make_perturbation(const std::string& family, int dim, double eps,
                               double c1, double c2) {
  Perturbation A;
  A.family_tag = family;
  if (family == "constant") {
    const double c = c1;
    A.A = [c](const Point&, const Point&) { return c; };
    A.c1 = A.c2 = c;
    A.xi_declared = 0.0;
    A.constant_in_x = true;
  } else if (family == "example") {
    // A(x,h) = beta(h)^{zeta(x)}, beta = e^{1 ^ ||h||^eps}, zeta = 1+e^{-||x||}.
    A.A = [eps](const Point& x, const Point& h) {
      const double b = std::min(1.0, std::pow(h.norm(), eps));
      const double zeta = 1.0 + std::exp(-x.norm());
      return std::exp(b * zeta);
    };
    A.c1 = 1.0;
    A.c2 = std::exp(2.0);
    // C' = sup_h max(A) |ln beta| psi = e^2 with the matching reciprocal psi,
    // and |zeta(x)-zeta(y)| < 1, so xi = e^2 dominates the uniform modulus.
    A.xi_declared = std::exp(2.0);
  } else if (family == "sigmoid") {
    A.A = [c1, c2](const Point& x, const Point&) {
      return c1 + (c2 - c1) / (1.0 + std::exp(-x[0]));
    };
    A.c1 = c1;
    A.c2 = c2;
  } else if (family == "step") {
    A.A = [c1, c2](const Point& x, const Point&) {
      return x[0] < 0.0 ? c1 : c2;
    };
    A.c1 = c1;
    A.c2 = c2;
  } else {
    throw std::domain_error("Perturbation: unknown family '" + family + "'");
  }
  (void)dim;
  return A;
}

StateKernel make_state_kernel(const JumpDensity& J, const Perturbation& A,
                              const ModulusFunction& psi) {
  StateKernel k;
  k.J = J;
  k.A = A;
  k.psi = psi;
  try {
    k.j_script = compute_j_script(J, psi);
    k.j_script_finite = true;
  } catch (const non_integrable_error&) {
    k.j_script = 0.0;
    k.j_script_finite = false;
  }
  return k;
}

StateKernel make_preset_kernel(const std::string& name, int dim, double eps) {
  if (name == "gs-like") {
    return make_state_kernel(make_jump_density(dim, constant_profile()),
                             make_perturbation("constant", dim, eps, 1.0, 1.0),
                             make_modulus("reciprocal", eps));
  }
  if (name == "log-profile") {
    return make_state_kernel(make_jump_density(dim, log_profile()),
                             make_perturbation("constant", dim, eps, 1.0, 1.0),
                             make_modulus("reciprocal", eps));
  }
  if (name == "example") {
    return make_state_kernel(make_jump_density(dim, constant_profile()),
                             make_perturbation("example", dim, eps),
                             make_modulus("reciprocal", eps));
  }
  if (name == "stable-like") {
    return make_state_kernel(make_jump_density(dim, power_profile(0.5)),
                             make_perturbation("constant", dim, eps, 1.0, 1.0),
                             make_modulus("reciprocal", eps));
  }
  throw std::domain_error("unknown kernel preset '" + name + "'");
}

}  // namespace levylab
