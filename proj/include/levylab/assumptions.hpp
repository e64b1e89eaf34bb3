#pragma once

#include <optional>
#include <string>
#include <vector>

#include "levylab/kernel.hpp"

namespace levylab {

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "inconclusive";
  }
}

// Deterministic sampling grids for the clause checks; every report echoes
// the spec it was produced with.
struct SampleSpec {
  double box_halfwidth = 4.0;
  int x_per_axis = 17;
  int pair_separations = 96;        // log-spaced |x-y| values per grid point
  double min_separation = 1e-7;
  int h_per_decade = 64;
  double h_radius_floor = 1e-9;
  double h_radius_cap = 4.0;        // for the xi estimate
  int angular_directions = 8;       // d = 2 only
  double delta_floor = 1e-6;
};

struct ClauseReport {
  std::string clause;
  Verdict verdict = Verdict::inconclusive;
  double value = 0.0;
  double error_estimate = 0.0;
  std::string detail;
};

struct DeltaEntry {
  double b = 0.0;
  double eps = 0.0;
  double delta = 0.0;  // 0 means: none found above the floor
};

struct AssumptionReport {
  std::vector<ClauseReport> clauses;
  double k0 = 0.0;
  double j_script = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double xi_estimate = 0.0;
  std::optional<double> xi_declared;
  std::vector<DeltaEntry> delta_table;
  SampleSpec spec;
  bool all_pass = false;
};

// Largest delta (bisection over [floor, box diameter]) such that sampled
// pairs with ||x-y|| < delta keep sup_{||h||<b} |A(x,h)-A(y,h)| psi(||h||)
// below eps. Returns 0 when no delta above the floor works.
double estimate_modulus_delta(const StateKernel& kernel, double b, double eps,
                              const SampleSpec& spec = {});

// Grid lower bound for the uniform modulus constant of Assumption 2.
double estimate_xi(const StateKernel& kernel, const SampleSpec& spec = {});

AssumptionReport validate_assumptions(const StateKernel& kernel,
                                      const SampleSpec& spec = {});

// eta = delta/2 with delta from the (b=1, eps=1) modulus search; throws
// localization_error when the search fails.
StateKernel localize_kernel_auto(const StateKernel& kernel, const Point& x0,
                                 const SampleSpec& spec = {},
                                 double* eta_out = nullptr);

}  // namespace levylab
