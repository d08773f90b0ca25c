#pragma once

#include <span>
#include <vector>

namespace kslab::fields {

// Uniform cell-centered radial grid on (0, R): centers r_i = (i + 1/2) h,
// edges at i h, with h = R / n.
struct RadialGrid {
  int n = 0;
  double R = 0.0;

  RadialGrid() = default;
  RadialGrid(int node_count, double radius);

  double h() const { return R / n; }
  double center(int i) const { return (i + 0.5) * h(); }
  double edge(int i) const { return i * h(); }
  bool operator==(const RadialGrid&) const = default;
};

// Radially symmetric density (mass per area) at cell centers, >= 0.
struct RadialDensity {
  RadialGrid grid;
  std::vector<double> values;  // size n

  RadialDensity() = default;
  RadialDensity(RadialGrid g, std::vector<double> v);
};

// Mass inside radius r at cell edges: m_0 = 0, m_n = total mass.
struct CumulativeMass {
  RadialGrid grid;
  std::vector<double> values;  // size n + 1

  CumulativeMass() = default;
  CumulativeMass(RadialGrid g, std::vector<double> v);

  double total() const { return values.back(); }
};

// Unit-mass 1D density represented by its quantile function, sampled at
// mass levels p_k = (k + 1/2) / K. Nondecreasing by construction.
struct QuantileDensity {
  std::vector<double> q;

  int K() const { return static_cast<int>(q.size()); }
  double level(int k) const { return (k + 0.5) / static_cast<double>(q.size()); }
};

enum class NegativePolicy { strict, clamp };

// m_i = 2 pi sum_{j<i} r_j rho_j h (midpoint rule; exact telescoping inverse).
CumulativeMass cumulative_from_density(const RadialDensity& rho);

// rho_i = (m_{i+1} - m_i) / (2 pi r_i h). Decreasing m means negative density:
// strict rejects it, clamp floors at zero and reports the clamped mass.
RadialDensity density_from_cumulative(const CumulativeMass& m,
                                      NegativePolicy policy = NegativePolicy::strict,
                                      double* clamped_mass = nullptr);

// Monotone rearrangement of nonnegative samples given at cell centers
// x_left + (j + 1/2) dx: normalizes to unit mass, inverts the piecewise-linear
// CDF at the K interior mass levels.
QuantileDensity quantile_from_samples(std::span<const double> values,
                                      double x_left, double dx, int K);

// Same quadrature as cumulative_from_density (and bit-identical to its total).
double total_mass(const RadialDensity& rho);

}  // namespace kslab::fields
