#pragma once

#include <functional>
#include <string>

#include "levylab/types.hpp"

namespace levylab {

// A bounded smooth function with exact gradient and certified bounds; this
// is everything the generator quadrature needs to know.
struct TestFunction {
  std::string family_tag;
  int dim = 1;
  std::function<double(const Point&)> f;
  std::function<Point(const Point&)> grad;
  double sup_norm = 0.0;
  double hessian_bound = 0.0;  // sup_x of the Hessian spectral norm
  double cb1 = 0.0, cb2 = 0.0, cb3 = 0.0;
};

struct TestFunctionParams {
  double amp = 1.0;
  Point center;          // bump / indicator center (defaults to 0)
  double width = 1.0;    // gaussian width
  Point freq;            // cosine frequency vector
  double phase = 0.0;
  double radius = 1.0;   // indicator radius
  double sharpness = 0.25;  // indicator transition scale
};

// family in {"gaussian-bump", "cosine", "smoothed-indicator", "constant"}.
TestFunction make_test_function(const std::string& family, int dim,
                                const TestFunctionParams& params = {});

}  // namespace levylab
