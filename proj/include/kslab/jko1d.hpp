#pragma once

#include <functional>
#include <vector>

#include "kslab/fields.hpp"

namespace kslab::jko {

using fields::QuantileDensity;

// F[rho] = entropy_coefficient int rho log rho + int rho V
//          + 1/2 intint W(x - y) drho drho, with W even.
struct FreeEnergySpec {
  double entropy_coefficient = 1.0;
  std::function<double(double)> potential;          // V
  std::function<double(double)> potential_prime;    // V'
  std::function<double(double)> interaction;        // W
  std::function<double(double)> interaction_prime;  // W'

  bool has_potential() const { return static_cast<bool>(potential); }
  bool has_interaction() const { return static_cast<bool>(interaction); }
};

struct JkoConfig {
  double tau = 1e-2;
  int K = 256;
  double inner_tolerance = 1e-11;
  int inner_max_iterations = 5000;
  bool halve_tau_on_failure = true;

  void validate() const;
};

// Exact 1D Wasserstein-2 distance between quantile representations:
// sqrt of the mean squared quantile gap.
double w2(const QuantileDensity& a, const QuantileDensity& b);

// Quantile-wise blend (1 - t) a + t b; the W2 geodesic.
QuantileDensity displacement_interpolate(const QuantileDensity& a,
                                         const QuantileDensity& b, double t);

// Entropy in quantile form is -mean log((q_{k+1} - q_k) K); zero-width gaps
// are floored at 1e-12 of the quantile range first.
double free_energy_eval(const FreeEnergySpec& spec, const QuantileDensity& rho);

struct StepResult {
  QuantileDensity state;
  double energy = 0.0;   // F[state]
  double w2_sq = 0.0;    // W2^2(previous, state)
  int iterations = 0;
  bool converged = false;
};

// One minimizing movement: projected descent over monotone quantile vectors
// for W2^2 / (2 tau) + F. Descent starts at the previous state, so
// F[out] + W2^2 / (2 tau) <= F[in] holds for every accepted iterate.
StepResult jko_step(const QuantileDensity& rho, const FreeEnergySpec& spec,
                    const JkoConfig& config);

struct RunResult {
  std::vector<QuantileDensity> states;    // n_steps + 1 entries
  std::vector<double> energies;           // per state
  std::vector<double> w2_increments;      // per step
  std::vector<double> taus;               // per step (halving may shrink them)
  double quadratic_sum = 0.0;             // sum W2^2 / (2 tau)
};

RunResult run_jko(const QuantileDensity& rho0, const FreeEnergySpec& spec,
                  JkoConfig config, int n_steps);

// Minimal centered second difference of t -> F[rho_t] along the displacement
// interpolation, divided by dt^2, plus its ratio to W2(a, b)^2.
struct ConvexityProbe {
  double min_second_difference = 0.0;
  double ratio = 0.0;
  double w2_ab = 0.0;
};

ConvexityProbe displacement_convexity_probe(const FreeEnergySpec& spec,
                                            const QuantileDensity& a,
                                            const QuantileDensity& b,
                                            int samples);

}  // namespace kslab::jko
