#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "levylab/kernel.hpp"
#include "levylab/test_functions.hpp"

namespace levylab {

// Minimal view of a smooth function that the quadrature needs; the gradient
// is only required by the compensated (first-difference) route.
struct BoundedFn {
  std::function<double(const Point&)> f;
  std::function<Point(const Point&)> grad;
  double sup_norm = 0.0;
  double hessian_bound = 0.0;
};

inline BoundedFn to_bounded(const TestFunction& tf) {
  return {tf.f, tf.grad, tf.sup_norm, tf.hessian_bound};
}

struct GeneratorOptions {
  double r_min = 0x1p-30;   // inner cutoff; below it a Taylor majorant rules
  double tol = 1e-8;        // absolute error target
  int angular_points = 64;  // d=2 starting trapezoid size, doubled to 1024
  std::size_t max_intervals = 3000;
};

struct GeneratorEval {
  double value = 0.0;
  double abs_error = 0.0;
  double inner = 0.0;        // contribution of [r_min, 1]
  double middle = 0.0;       // contribution of [1, r_max]
  double outer_bound = 0.0;  // bound on the discarded tail beyond r_max
  double small_ball_bound = 0.0;  // Taylor majorant below r_min
  double r_min = 0.0;
  double r_max = 0.0;
  bool inconclusive = false;
};

// Cache of x-independent kernel masses (tail beyond octaves, small ball);
// shared across calls on the same kernel, e.g. during grid sweeps.
struct GeneratorWorkspace {
  std::map<double, double> tail_mass;
  std::map<double, double> ball_h2_mass;
  std::mutex mutex;
};

// (Lf)(x) in the symmetric second-difference form
//   1/2 \int (f(x+h)+f(x-h)-2f(x)) K(x,h) dh.
GeneratorEval apply_generator(const StateKernel& kernel, const BoundedFn& f,
                              const Point& x, const GeneratorOptions& opts = {},
                              GeneratorWorkspace* workspace = nullptr);

inline GeneratorEval apply_generator(const StateKernel& kernel,
                                     const TestFunction& f, const Point& x,
                                     const GeneratorOptions& opts = {},
                                     GeneratorWorkspace* workspace = nullptr) {
  return apply_generator(kernel, to_bounded(f), x, opts, workspace);
}

// The compensated first-difference form
//   \int (f(x+h)-f(x) - 1_{||h||<1} grad f(x).h) K(x,h) dh,
// an independent algebraic route that must agree for symmetric kernels.
GeneratorEval apply_generator_compensated(const StateKernel& kernel,
                                          const BoundedFn& f, const Point& x,
                                          const GeneratorOptions& opts = {},
                                          GeneratorWorkspace* workspace = nullptr);

// A-priori bound 2 (||f|| v ||H_f||) c2 K0 without quadrature.
double generator_sup_bound(const StateKernel& kernel, const TestFunction& f);

struct ContinuityRow {
  int k = 0;          // pair distance 2^{-k}
  double modulus = 0.0;
};

// max_x |Lf(x) - Lf(x + 2^{-k} e1)| over the probe grid, per k.
std::vector<ContinuityRow> continuity_probe(const StateKernel& kernel,
                                            const TestFunction& f,
                                            const std::vector<Point>& x_grid,
                                            int k_min = 0, int k_max = 20,
                                            const GeneratorOptions& opts = {});

// Dense 1-d table of Lf with cubic-Hermite interpolation; the workhorse for
// evaluating the generator along simulated paths.
class GeneratorTable {
 public:
  GeneratorTable() = default;
  GeneratorTable(double lo, double dx, std::vector<double> values);

  double operator()(double x) const;
  double lo() const { return lo_; }
  double hi() const { return lo_ + dx_ * (values_.size() - 1); }

 private:
  double lo_ = 0.0;
  double dx_ = 1.0;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

GeneratorTable build_generator_table(const StateKernel& kernel,
                                     const TestFunction& f, double lo,
                                     double hi, std::size_t points,
                                     unsigned threads = 1,
                                     const GeneratorOptions& opts = {});

}  // namespace levylab
