#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kslab::numerics {

// Solve a tridiagonal system in place: diag a (lower), b (main), c (upper).
// b and rhs are overwritten; the solution lands in rhs.
void solve_tridiagonal(std::span<const double> lower, std::span<double> diag,
                       std::span<const double> upper, std::span<double> rhs);

// Pool-adjacent-violators projection onto nondecreasing sequences
// (unweighted least squares).
void isotonic_project(std::span<double> values);

// Least-squares line y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Natural cubic spline through (x_i, y_i), x strictly increasing.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);
  double value(double x) const;
  double derivative(double x) const;
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  std::size_t interval(double x) const;
  std::vector<double> x_, y_, m_;  // m_: second derivatives at knots
};

// Piecewise-linear interpolation on a sorted abscissa grid; clamps outside.
double interp_linear(std::span<const double> x, std::span<const double> y,
                     double xq);

// Trapezoid rule over uniformly spaced samples.
double trapezoid(std::span<const double> y, double dx);

}  // namespace kslab::numerics
