#include "kslab/particles.hpp"

#include <cmath>
#include <stdexcept>

#include "kslab/rng.hpp"

namespace kslab::particles {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;

double bump_raw(double r2) {
  if (r2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r2));
}
}  // namespace

void ParticleConfig::validate() const {
  if (!(mu > 0.0) || !(eta > 0.0))
    throw std::invalid_argument("ParticleConfig: diffusivities must be positive");
  if (!(alpha > 0.0 && alpha < 1.0 && alpha_hat > 0.0 && alpha_hat < 1.0))
    throw std::invalid_argument("ParticleConfig: exponents must lie in (0, 1)");
  if (!(alpha < alpha_hat))
    throw std::invalid_argument("ParticleConfig: requires alpha < alpha_hat");
}

double bump_normalization() {
  // 1 / (2 pi int_0^1 r e^{-1/(1-r^2)} dr), fixed once by fine midpoint rule.
  static const double c = [] {
    const int n = 200000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = (i + 0.5) / n;
      s += r * bump_raw(r * r) / n;
    }
    return 1.0 / (kTwoPi * s);
  }();
  return c;
}

double mollifier_eval(int N, double alpha, Vec2 x) {
  if (N <= 0) throw std::invalid_argument("mollifier_eval: N must be positive");
  double a = std::pow(static_cast<double>(N), alpha / 2.0);
  double sx = a * x.x, sy = a * x.y;
  return a * a * bump_normalization() * bump_raw(sx * sx + sy * sy);
}

EffectiveKernel::EffectiveKernel(int N, double alpha, double alpha_hat) {
  if (N <= 0) throw std::invalid_argument("EffectiveKernel: N must be positive");
  const double aN = std::pow(static_cast<double>(N), alpha / 2.0);
  const double ahatN = std::pow(static_cast<double>(N), alpha_hat / 2.0);
  const double r1 = 1.0 / aN;      // support radius of W_N
  const double r2 = 1.0 / ahatN;   // support radius of What_N
  support_ = r1 + r2;
  const double c = bump_normalization();

  // K(r) = int W_N(z) What_N(x - z) dz in polar coordinates around x.
  const int table = 257;
  const int nq = 160;  // radial x angular quadrature of the inner integral
  std::vector<double> rs(table), ks(table);
  for (int t = 0; t < table; ++t) {
    double r = support_ * t / (table - 1);
    double acc = 0.0;
    for (int i = 0; i < nq; ++i) {
      double s = r1 * (i + 0.5) / nq;
      double wn = aN * aN * c * bump_raw(aN * aN * s * s);
      double ring = 0.0;
      for (int j = 0; j < nq; ++j) {
        double th = kTwoPi * (j + 0.5) / nq;
        double dx = r - s * std::cos(th);
        double dy = s * std::sin(th);
        double d2 = dx * dx + dy * dy;
        ring += ahatN * ahatN * c * bump_raw(ahatN * ahatN * d2);
      }
      acc += s * wn * (ring / nq) * kTwoPi * (r1 / nq);
    }
    rs[t] = r;
    ks[t] = acc;
  }
  peak_ = ks[0];
  spline_ = numerics::CubicSpline(std::move(rs), std::move(ks));
}

double EffectiveKernel::value(double r) const {
  if (r >= support_) return 0.0;
  return spline_.value(r);
}

double EffectiveKernel::derivative(double r) const {
  if (r >= support_) return 0.0;
  return spline_.derivative(r);
}

FieldSample smoothed_field(const ParticleState& state, Species species, Vec2 x,
                           const EffectiveKernel& kernel) {
  const auto& pos = species == Species::bacteria ? state.u_positions
                                                 : state.v_positions;
  const int n_total = state.total_count();
  FieldSample out;
  if (pos.empty() || n_total == 0) return out;
  for (const Vec2& p : pos) {
    double dx = x.x - p.x;
    double dy = x.y - p.y;
    double r = std::sqrt(dx * dx + dy * dy);
    out.value += kernel.value(r);
    if (r > 1e-14) {
      double dk = kernel.derivative(r);
      out.gradient.x += dk * dx / r;
      out.gradient.y += dk * dy / r;
    }
  }
  out.value /= n_total;
  out.gradient.x /= n_total;
  out.gradient.y /= n_total;
  // Moderate-interaction bound: the smoothed field cannot exceed the kernel
  // peak times the species fraction.
  double bound = kernel.peak() * static_cast<double>(pos.size()) / n_total;
  if (out.value > bound * (1.0 + 1e-9))
    throw std::logic_error("smoothed_field: bound violated");
  return out;
}

void em_step(ParticleState& state, double dt, std::uint64_t seed,
             std::uint64_t step_index, const EffectiveKernel* kernel) {
  state.config.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("em_step: dt must be positive");
  const bool drift = state.config.chi != 0.0;
  if (drift && !kernel)
    throw std::invalid_argument("em_step: chi != 0 requires an effective kernel");
  const double su = std::sqrt(2.0 * state.config.mu * dt);
  const double sv = std::sqrt(2.0 * state.config.eta * dt);

  // Drift is evaluated on the pre-step chemical cloud for every bacterium.
  std::vector<Vec2> drifts;
  if (drift) {
    drifts.resize(state.u_positions.size());
    for (std::size_t k = 0; k < state.u_positions.size(); ++k) {
      FieldSample f = smoothed_field(state, Species::chemical,
                                     state.u_positions[k], *kernel);
      drifts[k] = {state.config.chi * f.gradient.x * dt,
                   state.config.chi * f.gradient.y * dt};
    }
  }
  for (std::size_t k = 0; k < state.u_positions.size(); ++k) {
    rng::Stream s(rng::substream(seed, step_index, 1, k));
    double gx = s.normal(), gy = s.normal();
    state.u_positions[k].x += (drift ? drifts[k].x : 0.0) + su * gx;
    state.u_positions[k].y += (drift ? drifts[k].y : 0.0) + su * gy;
  }
  for (std::size_t k = 0; k < state.v_positions.size(); ++k) {
    rng::Stream s(rng::substream(seed, step_index, 2, k));
    double gx = s.normal(), gy = s.normal();
    state.v_positions[k].x += sv * gx;
    state.v_positions[k].y += sv * gy;
  }
}

fields::RadialDensity empirical_density(const ParticleState& state,
                                        Species species, int bins, double radius) {
  const auto& pos = species == Species::bacteria ? state.u_positions
                                                 : state.v_positions;
  if (pos.empty()) throw std::invalid_argument("empirical_density: empty species");
  Vec2 c{0.0, 0.0};
  for (const Vec2& p : pos) {
    c.x += p.x;
    c.y += p.y;
  }
  c.x /= pos.size();
  c.y /= pos.size();

  fields::RadialGrid grid(bins, radius);
  std::vector<double> counts(bins, 0.0);
  for (const Vec2& p : pos) {
    double r = std::hypot(p.x - c.x, p.y - c.y);
    int b = static_cast<int>(r / grid.h());
    if (b >= bins) b = bins - 1;  // tail mass folded into the last annulus
    counts[b] += 1.0;
  }
  const double species_mass =
      static_cast<double>(pos.size()) / state.total_count();
  std::vector<double> rho(bins);
  for (int i = 0; i < bins; ++i)
    rho[i] = counts[i] / pos.size() * species_mass /
             (kTwoPi * grid.center(i) * grid.h());
  return fields::RadialDensity(grid, std::move(rho));
}

ParticleRun run_particles(ParticleState state, double dt, double t_end,
                          std::uint64_t seed, int record_every) {
  state.config.validate();
  const std::vector<Vec2> initial_u = state.u_positions;
  std::unique_ptr<EffectiveKernel> kernel;
  if (state.config.chi != 0.0)
    kernel = std::make_unique<EffectiveKernel>(state.total_count(),
                                               state.config.alpha,
                                               state.config.alpha_hat);
  ParticleRun run;
  auto record = [&](double t) {
    MomentRecord rec;
    rec.t = t;
    const int n_total = state.total_count();
    rec.mass_u = n_total ? static_cast<double>(state.u_positions.size()) / n_total : 0.0;
    rec.mass_v = n_total ? static_cast<double>(state.v_positions.size()) / n_total : 0.0;
    for (std::size_t k = 0; k < state.u_positions.size(); ++k) {
      const Vec2& p = state.u_positions[k];
      rec.centroid_u.x += p.x;
      rec.centroid_u.y += p.y;
      rec.second_moment_u += p.x * p.x + p.y * p.y;
      double mx = p.x - initial_u[k].x;
      double my = p.y - initial_u[k].y;
      rec.msd_u += mx * mx + my * my;
    }
    if (!state.u_positions.empty()) {
      double n = static_cast<double>(state.u_positions.size());
      rec.centroid_u.x /= n;
      rec.centroid_u.y /= n;
      rec.second_moment_u /= n;
      rec.msd_u /= n;
    }
    run.records.push_back(rec);
  };
  record(0.0);

  double t = 0.0;
  std::uint64_t step = 0;
  while (t + 0.5 * dt < t_end) {
    em_step(state, dt, seed, step, kernel.get());
    t += dt;
    ++step;
    if (step % static_cast<std::uint64_t>(record_every) == 0 ||
        t + 0.5 * dt >= t_end)
      record(t);
  }
  run.final_state = std::move(state);
  return run;
}

}  // namespace kslab::particles
