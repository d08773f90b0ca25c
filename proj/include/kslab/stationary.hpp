#pragma once

#include "kslab/fields.hpp"

namespace kslab::stationary {

// Steady aggregation profile family: scale lambda > 0, centered at the origin.
struct BubbleParams {
  double lambda = 1.0;
};

// U_lambda(r) = lambda^-2 U0(r / lambda), U0(y) = 8 / (1 + y^2)^2.
double bubble_density(const BubbleParams& p, double r);

// Closed-form mass inside radius r: 8 pi r^2 / (r^2 + lambda^2).
double bubble_cumulative(const BubbleParams& p, double r);

fields::RadialDensity bubble_on_grid(const BubbleParams& p, const fields::RadialGrid& g);
fields::CumulativeMass bubble_cumulative_on_grid(const BubbleParams& p,
                                                 const fields::RadialGrid& g);

// Sup-norm residual of -Lap_h C0 - U0 over interior nodes of a cell-centered
// grid with spacing h on (0, R), where C0 = log(8 / (1 + r^2)^2) and the
// radial 3-point conservative stencil is used. O(h^2).
double liouville_residual(double h, double R = 4.0);

// Sup-norm finite-difference residual of xi phi'' + (phi / 2pi - 1) phi' = 0
// at phi_a(xi) = 8 pi xi^2 / (xi^2 + a^2), interior nodes. O(h^2).
double phi_a_residual(double a, double h, double xi_max = 4.0);

// Laguerre polynomial L_k(x) by the three-term recurrence.
double laguerre_polynomial(int k, double x);

// Radial operator A psi = psi'' + (1/y - y/2) psi' + psi on (0, y_max] with
// eigenfunctions phi_k(y) = c_k L_k(y^2 / 4), c_k = sqrt(1 / (4 pi k!)), and
// eigenvalues 1 - k. Truncated with a zero-Dirichlet closure at y_max, where
// the Gaussian weight makes the truncation negligible.
struct LaguerreCheck {
  double eigen_residual;        // weighted L2 norm of (A_h - (1-k)) phi_k
  double norm_quadrature;       // int_0^ymax y phi_k^2 e^{-y^2/4} dy
  double norm_closed_form;      // 2 c_k^2 = 1 / (2 pi k!)
};
LaguerreCheck laguerre_eigen_check(int k, double h, double y_max = 12.0);

// lambda_hat = sqrt(8 / rho(0)); residual is the relative L2 error against
// the fitted profile on r <= 2 lambda_hat.
struct BubbleFit {
  double lambda_hat;
  double residual;
};
BubbleFit fit_bubble(const fields::RadialDensity& rho);

}  // namespace kslab::stationary
