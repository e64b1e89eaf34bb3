#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace levylab {

// Points and jump vectors live in R^d with d in {1,2}. Fixed max size keeps
// them on the stack so hot loops never allocate.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::AutoAlign, 2, 1>;

inline Point point1(double x) {
  Point p(1);
  p[0] = x;
  return p;
}

inline Point point2(double x, double y) {
  Point p(2);
  p[0] = x;
  p[1] = y;
  return p;
}

inline Point zero_point(int dim) {
  Point p(dim);
  p.setZero();
  return p;
}

// Unit vector along the first axis, or at angle theta in d=2.
inline Point unit_direction(int dim, double theta = 0.0) {
  if (dim == 1) {
    return point1(theta == 0.0 ? 1.0 : std::cos(theta) >= 0 ? 1.0 : -1.0);
  }
  return point2(std::cos(theta), std::sin(theta));
}

class non_integrable_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class quadrature_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class localization_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace levylab
