#include "kslab/burgers.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "kslab/numerics.hpp"

namespace kslab::burgers {

BurgersProblem BurgersProblem::closed_form(std::function<double(double)> u0,
                                           std::function<double(double)> du0,
                                           double x_min, double x_max) {
  if (!u0 || !du0) throw std::invalid_argument("BurgersProblem: u0 and u0' required");
  if (!(x_max > x_min)) throw std::invalid_argument("BurgersProblem: empty domain");
  return BurgersProblem{std::move(u0), std::move(du0), x_min, x_max};
}

BurgersProblem BurgersProblem::from_samples(std::span<const double> x,
                                            std::span<const double> u) {
  auto spline = std::make_shared<numerics::CubicSpline>(
      std::vector<double>(x.begin(), x.end()),
      std::vector<double>(u.begin(), u.end()));
  BurgersProblem p;
  p.x_min = spline->x_min();
  p.x_max = spline->x_max();
  p.u0 = [spline](double xx) { return spline->value(xx); };
  p.du0 = [spline](double xx) { return spline->derivative(xx); };
  return p;
}

ShockInfo shock_time(const BurgersProblem& problem, int samples) {
  if (samples < 8) throw std::invalid_argument("shock_time: too few samples");
  double best = 0.0;  // most negative slope
  double xb = problem.x_min;
  for (int i = 0; i <= samples; ++i) {
    double x = problem.x_min + (problem.x_max - problem.x_min) * i / samples;
    double d = problem.du0(x);
    if (d < best) {
      best = d;
      xb = x;
    }
  }
  ShockInfo info;
  if (best >= 0.0) {
    info.T = std::numeric_limits<double>::infinity();
    info.has_shock = false;
    return info;
  }
  // Ternary refinement of the slope minimum around the best sample. Sampled
  // data may carry derivative jumps, so keep the best of several candidates
  // rather than trusting the midpoint blindly.
  double step = (problem.x_max - problem.x_min) / samples;
  double lo = std::max(problem.x_min, xb - step);
  double hi = std::min(problem.x_max, xb + step);
  for (int it = 0; it < 200; ++it) {
    double m1 = lo + (hi - lo) / 3.0;
    double m2 = hi - (hi - lo) / 3.0;
    if (problem.du0(m1) < problem.du0(m2))
      hi = m2;
    else
      lo = m1;
  }
  info.x_m = xb;
  double slope = best;
  for (double cand : {0.5 * (lo + hi), lo, hi}) {
    double d = problem.du0(cand);
    if (d < slope) {
      slope = d;
      info.x_m = cand;
    }
  }
  info.T = -1.0 / slope;
  info.x0 = info.x_m - problem.u0(info.x_m) / slope;
  info.has_shock = true;
  return info;
}

double characteristic_eval(const BurgersProblem& problem, double z, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("characteristic_eval: t >= 0");
  if (t > 0.0) {
    ShockInfo s = shock_time(problem);
    if (s.has_shock && t >= s.T)
      throw std::invalid_argument("characteristic_eval: multivalued at or past the shock");
  }
  auto g = [&](double x) { return x + t * problem.u0(x) - z; };
  // Grow a bracket geometrically around x = z.
  double delta = 1e-3 * (1.0 + std::abs(z));
  double lo = z - delta, hi = z + delta;
  for (int it = 0; it < 200 && g(lo) > 0.0; ++it) {
    delta *= 2.0;
    lo = z - delta;
  }
  for (int it = 0; it < 200 && g(hi) < 0.0; ++it) {
    delta *= 2.0;
    hi = z + delta;
  }
  if (!(g(lo) <= 0.0 && g(hi) >= 0.0))
    throw std::runtime_error("characteristic_eval: bracketing failed");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-14 * (1.0 + std::abs(mid))) break;
  }
  return problem.u0(0.5 * (lo + hi));
}

double selfsimilar_exponent(int i) {
  if (i < 0) throw std::invalid_argument("selfsimilar_exponent: i >= 0");
  return 1.0 / (2.0 * i + 2.0);
}

double profile_solve(double y, double alpha, double C) {
  if (!(C > 0.0)) throw std::invalid_argument("profile_solve: C must be positive");
  double inv = 1.0 / alpha;
  double power = 1.0 + inv;
  long rounded = std::lround(power);
  if (std::abs(power - rounded) > 1e-9 || rounded % 2 == 0)
    throw std::invalid_argument("profile_solve: 1 + 1/alpha must be an odd integer");
  // y = -U - C U^p with odd integer p: the right side is strictly decreasing
  // in U, so bisection on a sign-change bracket suffices.
  auto upow = [&](double u) {
    return u >= 0.0 ? std::pow(u, power) : -std::pow(-u, power);
  };
  auto rhs = [&](double u) { return -u - C * upow(u); };
  double scale = std::pow(std::abs(y) / C + 1.0, alpha / (alpha + 1.0)) + std::abs(y) + 1.0;
  double lo = -scale, hi = scale;
  // rhs decreasing: rhs(lo) >= y >= rhs(hi) must hold.
  for (int it = 0; it < 200 && rhs(lo) < y; ++it) {
    lo *= 2.0;
  }
  for (int it = 0; it < 200 && rhs(hi) > y; ++it) {
    hi *= 2.0;
  }
  for (int it = 0; it < 300; ++it) {
    double mid = 0.5 * (lo + hi);
    if (rhs(mid) > y)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * (1.0 + std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

double sup_gradient(const BurgersProblem& problem, double t, int samples) {
  ShockInfo s = shock_time(problem, samples);
  if (s.has_shock && t >= s.T)
    throw std::invalid_argument("sup_gradient: t at or past the shock");
  double sup = 0.0;
  double arg = problem.x_min;
  for (int i = 0; i <= samples; ++i) {
    double x = problem.x_min + (problem.x_max - problem.x_min) * i / samples;
    double d = problem.du0(x);
    double ux = std::abs(d / (1.0 + t * d));
    if (ux > sup) {
      sup = ux;
      arg = x;
    }
  }
  // Refine around the sampled maximizer.
  double step = (problem.x_max - problem.x_min) / samples;
  double lo = std::max(problem.x_min, arg - step);
  double hi = std::min(problem.x_max, arg + step);
  auto val = [&](double x) {
    double d = problem.du0(x);
    return std::abs(d / (1.0 + t * d));
  };
  for (int it = 0; it < 200; ++it) {
    double m1 = lo + (hi - lo) / 3.0;
    double m2 = hi - (hi - lo) / 3.0;
    if (val(m1) > val(m2))
      hi = m2;
    else
      lo = m1;
  }
  for (double cand : {0.5 * (lo + hi), lo, hi}) sup = std::max(sup, val(cand));
  return sup;
}

double blowup_rate_fit(const BurgersProblem& problem,
                       std::span<const double> times) {
  ShockInfo s = shock_time(problem);
  if (!s.has_shock)
    throw std::invalid_argument("blowup_rate_fit: data never shocks");
  std::vector<double> lx, ly;
  for (double t : times) {
    if (!(t >= 0.0 && t < s.T))
      throw std::invalid_argument("blowup_rate_fit: times must lie in [0, T)");
    lx.push_back(std::log(s.T - t));
    ly.push_back(std::log(sup_gradient(problem, t)));
  }
  if (lx.size() < 3)
    throw std::invalid_argument("blowup_rate_fit: need at least three times");
  return numerics::fit_line(lx, ly).slope;
}

}  // namespace kslab::burgers
