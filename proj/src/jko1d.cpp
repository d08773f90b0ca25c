#include "kslab/jko1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kslab/numerics.hpp"

namespace kslab::jko {

namespace {

void check_same_k(const QuantileDensity& a, const QuantileDensity& b) {
  if (a.K() != b.K() || a.K() == 0)
    throw std::invalid_argument("quantile densities must share a positive K");
}

double quantile_range(const QuantileDensity& q) {
  return std::max(q.q.back() - q.q.front(), 1e-30);
}

void check_even_interaction(const FreeEnergySpec& spec, double range) {
  if (!spec.has_interaction()) return;
  for (int s = 1; s <= 8; ++s) {
    double z = range * s / 8.0;
    double wp = spec.interaction(z);
    double wm = spec.interaction(-z);
    double scale = 1.0 + std::max(std::abs(wp), std::abs(wm));
    if (std::abs(wp - wm) > 1e-12 * scale)
      throw std::invalid_argument("FreeEnergySpec: interaction is not even");
  }
}

// F and its gradient with respect to the quantile values.
struct Objective {
  const FreeEnergySpec& spec;
  const QuantileDensity* anchor;  // movement-limiter center (may be null)
  double tau;
  double gap_floor;

  double value(const std::vector<double>& q) const {
    const int K = static_cast<int>(q.size());
    double f = 0.0;
    if (anchor) {
      double s = 0.0;
      for (int k = 0; k < K; ++k) {
        double d = q[k] - anchor->q[k];
        s += d * d;
      }
      f += s / K / (2.0 * tau);
    }
    if (spec.entropy_coefficient != 0.0) {
      double s = 0.0;
      for (int k = 0; k + 1 < K; ++k) {
        double gap = std::max(q[k + 1] - q[k], gap_floor);
        s -= std::log(gap * K);
      }
      f += spec.entropy_coefficient * s / K;
    }
    if (spec.has_potential()) {
      double s = 0.0;
      for (int k = 0; k < K; ++k) s += spec.potential(q[k]);
      f += s / K;
    }
    if (spec.has_interaction()) {
      double s = 0.0;
      for (int j = 0; j < K; ++j)
        for (int k = 0; k < K; ++k) s += spec.interaction(q[j] - q[k]);
      f += 0.5 * s / (static_cast<double>(K) * K);
    }
    return f;
  }

  void gradient(const std::vector<double>& q, std::vector<double>& g) const {
    const int K = static_cast<int>(q.size());
    g.assign(K, 0.0);
    if (anchor) {
      for (int k = 0; k < K; ++k)
        g[k] += (q[k] - anchor->q[k]) / (K * tau);
    }
    if (spec.entropy_coefficient != 0.0) {
      for (int k = 0; k + 1 < K; ++k) {
        double gap = std::max(q[k + 1] - q[k], gap_floor);
        double d = spec.entropy_coefficient / (K * gap);
        g[k] += d;
        g[k + 1] -= d;
      }
    }
    if (spec.has_potential()) {
      for (int k = 0; k < K; ++k) g[k] += spec.potential_prime(q[k]) / K;
    }
    if (spec.has_interaction()) {
      for (int m = 0; m < K; ++m) {
        double s = 0.0;
        for (int k = 0; k < K; ++k) s += spec.interaction_prime(q[m] - q[k]);
        g[m] += s / (static_cast<double>(K) * K);
      }
    }
  }
};

}  // namespace

void JkoConfig::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("JkoConfig: tau must be positive");
  if (K < 16) throw std::invalid_argument("JkoConfig: K must be at least 16");
}

double w2(const QuantileDensity& a, const QuantileDensity& b) {
  check_same_k(a, b);
  double s = 0.0;
  for (int k = 0; k < a.K(); ++k) {
    double d = a.q[k] - b.q[k];
    s += d * d;
  }
  return std::sqrt(s / a.K());
}

QuantileDensity displacement_interpolate(const QuantileDensity& a,
                                         const QuantileDensity& b, double t) {
  check_same_k(a, b);
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("displacement_interpolate: t outside [0, 1]");
  QuantileDensity out;
  out.q.resize(a.K());
  for (int k = 0; k < a.K(); ++k) out.q[k] = (1.0 - t) * a.q[k] + t * b.q[k];
  return out;
}

double free_energy_eval(const FreeEnergySpec& spec, const QuantileDensity& rho) {
  if (rho.K() == 0) throw std::invalid_argument("free_energy_eval: empty state");
  if (spec.has_potential() && !spec.potential_prime)
    throw std::invalid_argument("free_energy_eval: potential without derivative");
  if (spec.has_interaction() && !spec.interaction_prime)
    throw std::invalid_argument("free_energy_eval: interaction without derivative");
  double range = quantile_range(rho);
  check_even_interaction(spec, range);
  if (spec.entropy_coefficient != 0.0) {
    for (int k = 0; k + 1 < rho.K(); ++k)
      if (!(rho.q[k + 1] >= rho.q[k]))
        throw std::invalid_argument("free_energy_eval: quantiles not nondecreasing");
  }
  Objective obj{spec, nullptr, 1.0, 1e-12 * range};
  return obj.value(rho.q);
}

StepResult jko_step(const QuantileDensity& rho, const FreeEnergySpec& spec,
                    const JkoConfig& config) {
  config.validate();
  if (rho.K() != config.K)
    throw std::invalid_argument("jko_step: state does not match config.K");
  double range = quantile_range(rho);
  check_even_interaction(spec, range);
  Objective obj{spec, &rho, config.tau, 1e-12 * range};

  std::vector<double> q = rho.q;
  std::vector<double> grad, trial;
  double fq = obj.value(q);
  double step = config.tau;  // natural scale of one movement
  int it = 0;
  int flat = 0;
  bool converged = false;
  for (; it < config.inner_max_iterations; ++it) {
    obj.gradient(q, grad);
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      trial = q;
      for (std::size_t k = 0; k < trial.size(); ++k) trial[k] -= step * grad[k];
      numerics::isotonic_project(trial);
      double ft = obj.value(trial);
      if (ft < fq) {
        double drop = fq - ft;
        q.swap(trial);
        fq = ft;
        step *= 1.25;
        accepted = true;
        flat = drop < config.inner_tolerance ? flat + 1 : 0;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) ++flat;
    if (flat >= 10) {
      converged = true;
      break;
    }
  }

  StepResult out;
  out.state.q = std::move(q);
  out.iterations = it;
  out.converged = converged;
  Objective plain{spec, nullptr, 1.0, 1e-12 * range};
  out.energy = plain.value(out.state.q);
  double s = 0.0;
  for (int k = 0; k < config.K; ++k) {
    double d = out.state.q[k] - rho.q[k];
    s += d * d;
  }
  out.w2_sq = s / config.K;
  return out;
}

RunResult run_jko(const QuantileDensity& rho0, const FreeEnergySpec& spec,
                  JkoConfig config, int n_steps) {
  config.validate();
  RunResult out;
  out.states.push_back(rho0);
  out.energies.push_back(free_energy_eval(spec, rho0));
  for (int n = 0; n < n_steps; ++n) {
    StepResult step = jko_step(out.states.back(), spec, config);
    if (!step.converged) {
      if (!config.halve_tau_on_failure || config.tau < 1e-12)
        throw std::runtime_error("run_jko: inner solver did not converge");
      config.tau *= 0.5;
      --n;
      continue;
    }
    out.quadratic_sum += step.w2_sq / (2.0 * config.tau);
    out.w2_increments.push_back(std::sqrt(step.w2_sq));
    out.taus.push_back(config.tau);
    out.energies.push_back(step.energy);
    out.states.push_back(std::move(step.state));
  }
  return out;
}

ConvexityProbe displacement_convexity_probe(const FreeEnergySpec& spec,
                                            const QuantileDensity& a,
                                            const QuantileDensity& b,
                                            int samples) {
  check_same_k(a, b);
  if (samples < 3)
    throw std::invalid_argument("displacement_convexity_probe: samples >= 3");
  const double dt = 1.0 / (samples - 1);
  std::vector<double> f(samples);
  for (int s = 0; s < samples; ++s)
    f[s] = free_energy_eval(spec, displacement_interpolate(a, b, s * dt));
  ConvexityProbe probe;
  probe.w2_ab = w2(a, b);
  double best = std::numeric_limits<double>::infinity();
  for (int s = 1; s + 1 < samples; ++s)
    best = std::min(best, (f[s + 1] - 2.0 * f[s] + f[s - 1]) / (dt * dt));
  probe.min_second_difference = best;
  double denom = probe.w2_ab * probe.w2_ab;
  probe.ratio = denom > 0.0 ? best / denom : 0.0;
  return probe;
}

}  // namespace kslab::jko
