#pragma once

#include <span>
#include <vector>

#include "kslab/diagnostics.hpp"
#include "kslab/fields.hpp"

namespace kslab::ks {

enum class Scheme { explicit_euler, semi_implicit };

struct SolverConfig {
  double dt_initial = 1e-3;
  double dt_min = 1e-12;
  double cfl_factor = 0.8;           // in (0, 1]
  double blowup_sup_threshold = 1e6;
  double t_end = 1.0;
  Scheme scheme = Scheme::semi_implicit;
  int record_every = 16;
  bool pure_diffusion = false;       // drop the aggregation term (test hook)
  bool heavy_diagnostics = false;    // also fill loghls/gns per record
  double nonneg_tol = 1e-8;          // relative m-monotonicity slack before halving dt
  int quiet_steps_to_double = 50;

  void validate() const;
};

enum class Termination { reached_t_end, blowup_detected, dt_underflow };

struct Trajectory {
  std::vector<double> times;
  std::vector<fields::CumulativeMass> states;
  std::vector<diag::DiagnosticRecord> records;
  Termination termination = Termination::reached_t_end;
  double t_final = 0.0;
};

// c_r(r_i) = -m(r_i) / (2 pi r_i) at cell centers, edge-interpolated m;
// zero at the axis since m = O(r^2).
std::vector<double> concentration_gradient(const fields::CumulativeMass& m);

// Interior RHS of m_t = m_rr - m_r / r + m m_r / (2 pi r) on edge values
// (entries 0 and n are zero: endpoints are pinned).
std::vector<double> mass_pde_rhs(const fields::CumulativeMass& m,
                                 bool pure_diffusion = false);

// One step of the free-space cumulative-mass equation; endpoints stay at
// m(0) = 0 and m(R) = M exactly. The explicit scheme rejects dt above the
// cfl_factor * h^2 / 2 parabolic bound.
fields::CumulativeMass step_mass_pde(const fields::CumulativeMass& m, double dt,
                                     const SolverConfig& config);

// Interior RHS of the background-subtracted ball equation
// m_t = m_rr + (m / 2 pi - 1) m_r / r + m.
std::vector<double> hv_rhs(const fields::CumulativeMass& m);

// One step of the ball equation with m(0) = 0 and m(R) = 0 enforced.
fields::CumulativeMass step_hv(const fields::CumulativeMass& m, double dt,
                               const SolverConfig& config);

// Adaptive loop: integrates to t_end, blow-up (sup rho above threshold) or
// dt underflow; halves dt when a step goes unstable, doubles it back (capped)
// after a quiet span.
Trajectory run(const fields::CumulativeMass& m0, const SolverConfig& config);

// w(r) = int_0^r xi m(xi) dxi on edges, trapezoid, w(0) = 0.
std::vector<double> w_from_m(const fields::CumulativeMass& m);

// Rescaled frame for blow-up analysis: tau = -log(T - t), y = r (T - t)^{-1/2}.
struct SelfSimilarFrame {
  double T = 0.0;
  std::vector<double> y;
  double tau(double t) const;
};

struct SelfSimilarSlice {
  std::vector<double> W;  // NaN where y sqrt(T - t) leaves the r-grid
  double tau = 0.0;
};

// W(y, tau) = (T - t)^{-1} w(y sqrt(T - t)) resampled onto the frame's y-grid.
SelfSimilarSlice to_selfsimilar(std::span<const double> w_edges,
                                const fields::RadialGrid& grid, double t,
                                const SelfSimilarFrame& frame);

// Fit 1 / sup rho linearly in t over the last up-to-20 records and
// extrapolate to zero. An estimate, not a certified blow-up time.
double estimate_blowup_time(const Trajectory& trajectory);

// S(t) = (T_est - t) sup rho. type2 is set when S grows over the final decade
// of T_est - t (log-log slope below -0.02).
struct SIndicatorResult {
  std::vector<double> t;
  std::vector<double> S;
  bool type2 = false;
  double loglog_slope = 0.0;
};
SIndicatorResult s_indicator(const Trajectory& trajectory, double t_est);

diag::RateCheck second_moment_rate_check(const Trajectory& trajectory);

}  // namespace kslab::ks
