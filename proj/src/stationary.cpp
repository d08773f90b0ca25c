#include "kslab/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kslab::stationary {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;

double u0(double y) {
  double d = 1.0 + y * y;
  return 8.0 / (d * d);
}

double c0(double y) { return std::log(u0(y)); }
}  // namespace

double bubble_density(const BubbleParams& p, double r) {
  if (!(p.lambda > 0.0)) throw std::invalid_argument("bubble_density: lambda must be positive");
  double y = r / p.lambda;
  return u0(y) / (p.lambda * p.lambda);
}

double bubble_cumulative(const BubbleParams& p, double r) {
  if (!(p.lambda > 0.0)) throw std::invalid_argument("bubble_cumulative: lambda must be positive");
  double r2 = r * r;
  return 8.0 * kPi * r2 / (r2 + p.lambda * p.lambda);
}

fields::RadialDensity bubble_on_grid(const BubbleParams& p, const fields::RadialGrid& g) {
  std::vector<double> v(g.n);
  for (int i = 0; i < g.n; ++i) v[i] = bubble_density(p, g.center(i));
  return fields::RadialDensity(g, std::move(v));
}

fields::CumulativeMass bubble_cumulative_on_grid(const BubbleParams& p,
                                                 const fields::RadialGrid& g) {
  std::vector<double> v(g.n + 1);
  for (int i = 0; i <= g.n; ++i) v[i] = bubble_cumulative(p, g.edge(i));
  return fields::CumulativeMass(g, std::move(v));
}

double liouville_residual(double h, double R) {
  if (!(h > 0.0) || !(R > 2.0 * h))
    throw std::invalid_argument("liouville_residual: bad grid");
  const int n = static_cast<int>(std::floor(R / h));
  double worst = 0.0;
  // Conservative radial stencil (1/r)(r u_r)_r with edge fluxes; the first
  // cell sees zero flux through r = 0.
  for (int i = 0; i < n - 1; ++i) {
    double r = (i + 0.5) * h;
    double rp = (i + 1) * h;
    double rm = i * h;
    double up = c0(r + h);
    double uc = c0(r);
    double um = i > 0 ? c0(r - h) : 0.0;
    double flux_p = rp * (up - uc) / h;
    double flux_m = i > 0 ? rm * (uc - um) / h : 0.0;
    double lap = (flux_p - flux_m) / (r * h);
    worst = std::max(worst, std::abs(-lap - u0(r)));
  }
  return worst;
}

double phi_a_residual(double a, double h, double xi_max) {
  if (!(a > 0.0)) throw std::invalid_argument("phi_a_residual: a must be positive");
  if (!(h > 0.0) || !(xi_max > 3.0 * h))
    throw std::invalid_argument("phi_a_residual: bad grid");
  auto phi = [a](double xi) {
    double x2 = xi * xi;
    return 8.0 * kPi * x2 / (x2 + a * a);
  };
  const int n = static_cast<int>(std::floor(xi_max / h));
  double worst = 0.0;
  for (int i = 1; i < n; ++i) {
    double xi = i * h;
    double pp = phi(xi + h);
    double pc = phi(xi);
    double pm = phi(xi - h);
    double second = (pp - 2.0 * pc + pm) / (h * h);
    double first = (pp - pm) / (2.0 * h);
    double res = xi * second + (pc / kTwoPi - 1.0) * first;
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

double laguerre_polynomial(int k, double x) {
  if (k < 0) throw std::invalid_argument("laguerre_polynomial: negative order");
  double lm1 = 1.0;
  if (k == 0) return lm1;
  double l = 1.0 - x;
  for (int j = 1; j < k; ++j) {
    double next = ((2.0 * j + 1.0 - x) * l - j * lm1) / (j + 1.0);
    lm1 = l;
    l = next;
  }
  return l;
}

LaguerreCheck laguerre_eigen_check(int k, double h, double y_max) {
  if (k < 0 || k > 3) throw std::invalid_argument("laguerre_eigen_check: k in {0,1,2,3}");
  if (!(y_max >= 10.0)) throw std::invalid_argument("laguerre_eigen_check: y_max >= 10");
  const int n = static_cast<int>(std::floor(y_max / h));
  double ck = std::sqrt(1.0 / (4.0 * kPi * std::tgamma(k + 1.0)));
  auto phi = [&](double y) { return ck * laguerre_polynomial(k, 0.25 * y * y); };
  const double eig = 1.0 - k;

  double res2 = 0.0;
  double norm_quad = 0.0;
  for (int i = 0; i < n; ++i) {
    double y = (i + 0.5) * h;
    double w = y * std::exp(-0.25 * y * y) * h;
    norm_quad += w * phi(y) * phi(y);
    if (i == n - 1) continue;  // Dirichlet closure cell
    double pc = phi(y);
    double pp = phi(y + h);
    double pm = i > 0 ? phi(y - h) : 0.0;
    double yp = (i + 1) * h;
    double ym = i * h;
    double flux_p = yp * (pp - pc) / h;
    double flux_m = i > 0 ? ym * (pc - pm) / h : 0.0;
    double lap = (flux_p - flux_m) / (y * h);  // psi'' + psi'/y
    double drift = -0.5 * y * (i > 0 ? (pp - pm) / (2.0 * h) : (pp - pc) / h);
    double apsi = lap + drift + pc;
    double r = apsi - eig * pc;
    res2 += w * r * r;
  }
  LaguerreCheck out;
  out.eigen_residual = std::sqrt(res2);
  out.norm_quadrature = norm_quad;
  out.norm_closed_form = 2.0 * ck * ck;
  return out;
}

BubbleFit fit_bubble(const fields::RadialDensity& rho) {
  if (rho.values.empty() || !(rho.values.front() > 0.0))
    throw std::invalid_argument("fit_bubble: zero central density");
  // Cell centers start at h/2; extrapolate the even profile to r = 0
  // ((9 f(h/2) - f(3h/2)) / 8 is O(h^4) for smooth even f).
  double center = rho.values.front();
  if (rho.grid.n >= 2) {
    double extrap = (9.0 * rho.values[0] - rho.values[1]) / 8.0;
    if (extrap > 0.0) center = extrap;
  }
  BubbleFit fit;
  // rho(0) = 8 / lambda^2 for an exact profile.
  fit.lambda_hat = std::sqrt(8.0 / center);
  BubbleParams p{fit.lambda_hat};
  const double rmax = 2.0 * fit.lambda_hat;
  double num = 0.0, den = 0.0;
  const double h = rho.grid.h();
  for (int i = 0; i < rho.grid.n; ++i) {
    double r = rho.grid.center(i);
    if (r > rmax) break;
    double w = kTwoPi * r * h;
    double d = rho.values[i] - bubble_density(p, r);
    num += w * d * d;
    den += w * bubble_density(p, r) * bubble_density(p, r);
  }
  fit.residual = den > 0.0 ? std::sqrt(num / den) : std::numeric_limits<double>::infinity();
  return fit;
}

}  // namespace kslab::stationary
