#pragma once

#include <cmath>
#include <span>

#include "kslab/fields.hpp"

namespace kslab::diag {

inline constexpr double kPi = 3.1415926535897932384626433832795;
inline constexpr double kCriticalMass = 8.0 * kPi;

// Entropy is monotone for M <= 4 / C^2 with C the p=4 interpolation constant;
// the admissible-mass threshold 1.862 x 4 pi calibrates the default C.
inline constexpr double kGnsAdmissibleMass = 1.862 * 4.0 * kPi;
inline const double kGnsConstant = std::sqrt(4.0 / kGnsAdmissibleMass);

// Per-snapshot scalar functionals of a solver state. lambda_hat and the
// deficits are filled only when requested; NaN marks "not computed".
struct DiagnosticRecord {
  double t = 0.0;
  double mass = 0.0;
  double second_moment = 0.0;
  double entropy = 0.0;
  double free_energy = 0.0;
  double sup_density = 0.0;
  double lambda_hat = std::nan("");
  double loghls_deficit = std::nan("");
  double gns_deficit = std::nan("");
};

double mass(const fields::RadialDensity& rho);
double second_moment(const fields::RadialDensity& rho);

// int rho log rho with the 0 log 0 = 0 convention.
double entropy(const fields::RadialDensity& rho);

// E[rho] = int rho log rho - 1/2 int rho c, with c integrated inward from the
// gauge c(R) = 0. Differences between states of equal mass are gauge-free.
double free_energy_ks(const fields::RadialDensity& rho);

// Same energy in the free-space gauge c = -(1/2pi) log|.| * rho, evaluated by
// the radial log-kernel reduction (O(n^2)).
double free_energy_ks_freespace(const fields::RadialDensity& rho);

// C(M) = M (1 + log pi - log M).
double loghls_constant(double m);

// int f log f + (2/M) intint f f log|x-y| + C(M), >= 0 up to quadrature error.
double loghls_deficit(const fields::RadialDensity& f);

// c_num ||grad u|| ||u|| - ||u||^2_{L4} with discrete radial gradients.
double gns_deficit(const fields::RadialDensity& u, double c_num = kGnsConstant);

// The two sides of d/dt int rho log rho = -4 int |grad sqrt(rho)|^2 + int rho^2.
struct DissipationBalance {
  double gradient_term;    // -4 int |grad sqrt(rho)|^2
  double production_term;  // int rho^2
};
DissipationBalance entropy_dissipation_balance(const fields::RadialDensity& rho);

// True when the boundary sees mass: rho(R) >= 1e-10 sup rho.
bool boundary_contaminated(const fields::RadialDensity& rho);

// Max relative deviation of centered dM2/dt from the constant prediction
// 4 M (1 - M / 8 pi). boundary_contaminated is filled by callers that can see
// the final state; the check itself is still reported.
struct RateCheck {
  double max_rel_deviation;
  double predicted_rate;
  bool boundary_contaminated = false;
};
RateCheck second_moment_rate_check(std::span<const double> times,
                                   std::span<const double> m2, double mass_value);

// Uniform-in-time entropy bound (8 pi E0 - M C(M)) / (8 pi - M) for M < 8 pi,
// in the free-space gauge.
double entropy_bound(double free_energy0_freespace, double m);

}  // namespace kslab::diag
