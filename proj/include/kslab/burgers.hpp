#pragma once

#include <functional>
#include <span>
#include <vector>

namespace kslab::burgers {

// Initial data for u_t + u u_x = 0 with a usable derivative, either
// closed-form or spline-reconstructed from samples.
struct BurgersProblem {
  std::function<double(double)> u0;
  std::function<double(double)> du0;
  double x_min = 0.0;
  double x_max = 0.0;

  static BurgersProblem closed_form(std::function<double(double)> u0,
                                    std::function<double(double)> du0,
                                    double x_min, double x_max);
  static BurgersProblem from_samples(std::span<const double> x,
                                     std::span<const double> u);
};

// First crossing of characteristics: T = min -1 / u0'(x) over u0' < 0, the
// argmin x_m, and the shock location x0 = x_m - u0(x_m) / u0'(x_m).
// Nondecreasing data carries no shock (T = infinity).
struct ShockInfo {
  double T = 0.0;
  double x_m = 0.0;
  double x0 = 0.0;
  bool has_shock = false;
};
ShockInfo shock_time(const BurgersProblem& problem, int samples = 8192);

// u(z, t) = u0(x) with z = u0(x) t + x, solved for x by bracketed bisection.
// Only valid before the shock.
double characteristic_eval(const BurgersProblem& problem, double z, double t);

// alpha_i = 1 / (2 i + 2): the discrete family of smooth similarity exponents.
double selfsimilar_exponent(int i);

// Unique real root U of y = -U - C U^{1 + 1/alpha} for admissible alpha
// (1 + 1/alpha an odd integer) and C > 0.
double profile_solve(double y, double alpha, double C);

// sup_x |u_x(., t)| from the characteristic form u0' / (1 + t u0').
double sup_gradient(const BurgersProblem& problem, double t, int samples = 8192);

// Least-squares slope of log sup|u_x| against log(T - t); -1 for generic
// smooth data.
double blowup_rate_fit(const BurgersProblem& problem,
                       std::span<const double> times);

}  // namespace kslab::burgers
