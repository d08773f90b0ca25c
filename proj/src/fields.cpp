#include "kslab/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace kslab::fields {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

RadialGrid::RadialGrid(int node_count, double radius) : n(node_count), R(radius) {
  if (n <= 0) throw std::invalid_argument("RadialGrid: node_count must be positive");
  if (!(R > 0.0)) throw std::invalid_argument("RadialGrid: radius must be positive");
}

RadialDensity::RadialDensity(RadialGrid g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid.n)
    throw std::invalid_argument("RadialDensity: expected one value per cell");
  for (double x : values)
    if (!(x >= 0.0)) throw std::invalid_argument("RadialDensity: negative value");
}

CumulativeMass::CumulativeMass(RadialGrid g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid.n + 1)
    throw std::invalid_argument("CumulativeMass: expected one value per edge");
  if (values.front() != 0.0)
    throw std::invalid_argument("CumulativeMass: m(0) must be zero");
}

CumulativeMass cumulative_from_density(const RadialDensity& rho) {
  const int n = rho.grid.n;
  const double h = rho.grid.h();
  std::vector<double> m(n + 1);
  m[0] = 0.0;
  for (int i = 0; i < n; ++i)
    m[i + 1] = m[i] + kTwoPi * rho.grid.center(i) * rho.values[i] * h;
  return CumulativeMass(rho.grid, std::move(m));
}

RadialDensity density_from_cumulative(const CumulativeMass& m,
                                      NegativePolicy policy,
                                      double* clamped_mass) {
  const int n = m.grid.n;
  const double h = m.grid.h();
  std::vector<double> rho(n);
  double clamped = 0.0;
  for (int i = 0; i < n; ++i) {
    double dm = m.values[i + 1] - m.values[i];
    if (dm < 0.0) {
      if (policy == NegativePolicy::strict)
        throw std::invalid_argument("density_from_cumulative: decreasing mass");
      clamped += -dm;
      dm = 0.0;
    }
    rho[i] = dm / (kTwoPi * m.grid.center(i) * h);
  }
  if (clamped_mass) *clamped_mass = clamped;
  return RadialDensity(m.grid, std::move(rho));
}

QuantileDensity quantile_from_samples(std::span<const double> values,
                                      double x_left, double dx, int K) {
  if (values.empty()) throw std::invalid_argument("quantile_from_samples: no samples");
  if (!(dx > 0.0)) throw std::invalid_argument("quantile_from_samples: dx must be positive");
  if (K < 1) throw std::invalid_argument("quantile_from_samples: K must be positive");
  const std::size_t n = values.size();
  std::vector<double> cdf(n + 1);
  cdf[0] = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!(values[j] >= 0.0))
      throw std::invalid_argument("quantile_from_samples: negative sample");
    cdf[j + 1] = cdf[j] + values[j] * dx;
  }
  const double total = cdf[n];
  if (!(total > 0.0))
    throw std::invalid_argument("quantile_from_samples: zero total mass");

  QuantileDensity out;
  out.q.resize(K);
  std::size_t j = 0;
  for (int k = 0; k < K; ++k) {
    const double target = total * (k + 0.5) / K;
    while (j + 1 < n && cdf[j + 1] < target) ++j;
    // Invert the linear piece over cell j; flat cells collapse to the left edge.
    double cell = cdf[j + 1] - cdf[j];
    double frac = cell > 0.0 ? (target - cdf[j]) / cell : 0.0;
    out.q[k] = x_left + (static_cast<double>(j) + frac) * dx;
  }
  return out;
}

double total_mass(const RadialDensity& rho) {
  double m = 0.0;
  const double h = rho.grid.h();
  for (int i = 0; i < rho.grid.n; ++i)
    m += kTwoPi * rho.grid.center(i) * rho.values[i] * h;
  return m;
}

}  // namespace kslab::fields
