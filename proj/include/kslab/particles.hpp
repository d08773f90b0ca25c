#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "kslab/fields.hpp"
#include "kslab/numerics.hpp"

namespace kslab::particles {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class Species { bacteria, chemical };  // u and v populations

// Diffusivities, sensitivity and mollifier exponents of the two-species
// system. The exponents obey the moderate-interaction ordering alpha < alpha_hat.
struct ParticleConfig {
  double mu = 1.0;
  double eta = 1.0;
  double chi = 0.0;      // constant chemotactic sensitivity
  double alpha = 0.3;
  double alpha_hat = 0.5;

  void validate() const;
};

struct ParticleState {
  std::vector<Vec2> u_positions;
  std::vector<Vec2> v_positions;
  ParticleConfig config;

  int total_count() const {
    return static_cast<int>(u_positions.size() + v_positions.size());
  }
};

// Normalization constant of the base bump W_1 = c exp(-1 / (1 - |x|^2)) on
// |x| < 1 in 2D.
double bump_normalization();

// W_N(x) = alpha_N^2 W_1(alpha_N x), alpha_N = N^{alpha/2}; integrates to one.
double mollifier_eval(int N, double alpha, Vec2 x);

// Radial table of the double mollification W_N * What_N with a cubic-spline
// read-out; avoids the inner convolution during particle sweeps.
class EffectiveKernel {
 public:
  EffectiveKernel(int N, double alpha, double alpha_hat);
  double value(double r) const;
  double derivative(double r) const;
  double peak() const { return peak_; }
  double support_radius() const { return support_; }

 private:
  numerics::CubicSpline spline_;
  double support_ = 0.0;
  double peak_ = 0.0;
};

struct FieldSample {
  double value = 0.0;
  Vec2 gradient;
};

// (1/N) sum_k kernel(x - P_k) over the requested species, with its gradient.
FieldSample smoothed_field(const ParticleState& state, Species species, Vec2 x,
                           const EffectiveKernel& kernel);

// One Euler-Maruyama update. u-particles drift along chi grad s_v and diffuse
// with sqrt(2 mu); v-particles diffuse with sqrt(2 eta). Increments come from
// per-particle substreams of the seed, so the result is independent of
// traversal order and reproducible bit for bit.
void em_step(ParticleState& state, double dt, std::uint64_t seed,
             std::uint64_t step_index, const EffectiveKernel* kernel = nullptr);

// Radial histogram around the species centroid, normalized so the result
// carries the species' share count/N of unit mass.
fields::RadialDensity empirical_density(const ParticleState& state,
                                        Species species, int bins, double radius);

struct MomentRecord {
  double t = 0.0;
  double mass_u = 0.0;  // count / N
  double mass_v = 0.0;
  Vec2 centroid_u;
  double second_moment_u = 0.0;  // about the origin
  double msd_u = 0.0;            // mean squared displacement from t = 0
};

struct ParticleRun {
  std::vector<MomentRecord> records;
  ParticleState final_state;
};

ParticleRun run_particles(ParticleState state, double dt, double t_end,
                          std::uint64_t seed, int record_every = 8);

}  // namespace kslab::particles
