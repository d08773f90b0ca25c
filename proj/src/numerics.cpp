#include "kslab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kslab::numerics {

void solve_tridiagonal(std::span<const double> lower, std::span<double> diag,
                       std::span<const double> upper, std::span<double> rhs) {
  const std::size_t n = diag.size();
  if (n == 0) return;
  if (lower.size() != n - 1 || upper.size() != n - 1 || rhs.size() != n)
    throw std::invalid_argument("solve_tridiagonal: inconsistent sizes");
  for (std::size_t i = 1; i < n; ++i) {
    double w = lower[i - 1] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

void isotonic_project(std::span<double> values) {
  const std::size_t n = values.size();
  if (n < 2) return;
  // Block PAV: (mean, weight) per pooled block.
  std::vector<double> mean(n), weight(n);
  std::vector<std::size_t> len(n);
  std::size_t blocks = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mean[blocks] = values[i];
    weight[blocks] = 1.0;
    len[blocks] = 1;
    ++blocks;
    while (blocks > 1 && mean[blocks - 2] > mean[blocks - 1]) {
      double w = weight[blocks - 2] + weight[blocks - 1];
      mean[blocks - 2] =
          (mean[blocks - 2] * weight[blocks - 2] + mean[blocks - 1] * weight[blocks - 1]) / w;
      weight[blocks - 2] = w;
      len[blocks - 2] += len[blocks - 1];
      --blocks;
    }
  }
  std::size_t pos = 0;
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t k = 0; k < len[b]; ++k) values[pos++] = mean[b];
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate abscissa");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 3 || y_.size() != n)
    throw std::invalid_argument("CubicSpline: need >= 3 knots");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1]))
      throw std::invalid_argument("CubicSpline: abscissa not increasing");
  // Natural boundary: m_0 = m_{n-1} = 0.
  std::vector<double> a(n - 3), b(n - 2), c(n - 3), r(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double hl = x_[i] - x_[i - 1];
    double hr = x_[i + 1] - x_[i];
    if (i > 1) a[i - 2] = hl;
    b[i - 1] = 2.0 * (hl + hr);
    if (i + 2 < n) c[i - 1] = hr;
    r[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
  }
  solve_tridiagonal(a, b, c, r);
  m_.assign(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) m_[i] = r[i - 1];
}

std::size_t CubicSpline::interval(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - x_.begin());
  if (i == 0) return 0;
  if (i >= x_.size()) return x_.size() - 2;
  return i - 1;
}

double CubicSpline::value(double x) const {
  std::size_t i = interval(x);
  double h = x_[i + 1] - x_[i];
  double A = (x_[i + 1] - x) / h;
  double B = (x - x_[i]) / h;
  return A * y_[i] + B * y_[i + 1] +
         ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double x) const {
  std::size_t i = interval(x);
  double h = x_[i + 1] - x_[i];
  double A = (x_[i + 1] - x) / h;
  double B = (x - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h -
         (3.0 * A * A - 1.0) / 6.0 * h * m_[i] +
         (3.0 * B * B - 1.0) / 6.0 * h * m_[i + 1];
}

double interp_linear(std::span<const double> x, std::span<const double> y,
                     double xq) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("interp_linear: inconsistent sizes");
  if (xq <= x.front()) return y.front();
  if (xq >= x.back()) return y.back();
  auto it = std::upper_bound(x.begin(), x.end(), xq);
  std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
  double t = (xq - x[i]) / (x[i + 1] - x[i]);
  return (1.0 - t) * y[i] + t * y[i + 1];
}

double trapezoid(std::span<const double> y, double dx) {
  if (y.size() < 2) return 0.0;
  double s = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
  return s * dx;
}

}  // namespace kslab::numerics
