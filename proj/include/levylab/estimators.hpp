#pragma once

#include <functional>
#include <string>
#include <vector>

#include "levylab/frozen.hpp"
#include "levylab/generator.hpp"
#include "levylab/paths.hpp"
#include "levylab/stats.hpp"

namespace levylab {

struct MartingaleCell {
  std::string f_tag;
  double s = 0.0, t = 0.0;
  std::string weight_tag;
  double residual = 0.0;
  double stderr_ = 0.0;
  bool pass = false;
  bool inconclusive = false;
};

struct MartingaleReport {
  std::vector<MartingaleCell> cells;
  bool all_pass = false;
  double worst_sigmas = 0.0;  // max |residual| / stderr over the battery
};

struct MartingaleOptions {
  double table_halfwidth = 64.0;
  double table_dx = 1.0 / 64.0;
  GeneratorOptions generator;
  int weight_count = 8;
};

// Weighted-residual battery for the discrete scheme: for dyadic s < t,
// E[(M_t - M_s) w] with M_t = f(X_t) - f(X_0) - sum_k Lf(X_{t_k}) dt
// (left endpoints, matching the frozen scheme).
MartingaleReport martingale_test(
    const StateKernel& kernel, const PathConfig& cfg,
    const std::vector<TestFunction>& fs,
    const std::vector<std::pair<double, double>>& pairs,
    const MartingaleOptions& opts = {});

struct ResolventMcResult {
  Point x;
  double estimate = 0.0;
  double stderr_ = 0.0;
  double truncation_bias_bound = 0.0;
};

// R_lambda g(x) by the path ensemble: E sum e^{-lambda t_k} g(X_{t_k}) dt.
// Throws when the horizon truncation bound exceeds bias_tol.
std::vector<ResolventMcResult> resolvent_mc(
    const StateKernel& kernel, const PathConfig& cfg,
    const std::function<double(const Point&)>& g, double sup_g, double lambda,
    const std::vector<Point>& x_list,
    double bias_tol = std::numeric_limits<double>::infinity());

// Left-endpoint discretization bound for the estimator above:
// dt (lambda ||g|| + B)/(2 lambda) (1 + lambda dt) with B a sup bound on the
// generator applied to g, plus the horizon truncation.
double resolvent_mc_bias_bound(double lambda, double dt, double sup_g,
                               double generator_bound, double horizon);

struct ContinuityProbeRow {
  double offset = 0.0;
  double modulus = 0.0;
  double stderr_ = 0.0;
  bool inconclusive = false;
};

struct ResolventContinuityReport {
  std::vector<ContinuityProbeRow> rows;  // ordered as given
  double gamma_fit = 0.0;                // exponent of the (L(r0)/L(d))^g law
  double r0 = 0.5;
  bool decaying = false;  // monotone decrease within 4-sigma noise bands
};

// |R_lambda g(x0) - R_lambda g(x0+delta)| across shrinking offsets, with
// common-random-number pairing per path.
ResolventContinuityReport resolvent_continuity_probe(
    const StateKernel& kernel, const PathConfig& cfg,
    const std::function<double(const Point&)>& g, double lambda,
    const Point& x0, const std::vector<double>& offsets);

struct PerturbationGapReport {
  double lambda = 0.0;
  double xi = 0.0;
  double j_script = 0.0;
  double max_g = 0.0;
  double bound = 0.0;         // (4 xi J / lambda) max|g|
  double measured_sup = 0.0;  // max over probes |(L - M^{x0}) R^{x0} g|
  double numeric_error = 0.0;
  bool within_bound = false;
  bool contraction_applicable = false;  // lambda >= 8 xi J
  bool contraction_ok = false;          // measured_sup <= max|g| / 2
  double fft_residual = 0.0;
};

PerturbationGapReport perturbation_gap(const StateKernel& kernel,
                                       const Point& x0, double lambda,
                                       const std::function<double(const Point&)>& g,
                                       const std::vector<Point>& probes,
                                       const ResolventOptions& ropts = {});

}  // namespace levylab
