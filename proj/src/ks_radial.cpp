#include "kslab/ks_radial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kslab/numerics.hpp"
#include "kslab/stationary.hpp"

namespace kslab::ks {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;

double sup_density(const fields::CumulativeMass& m) {
  const double h = m.grid.h();
  double sup = 0.0;
  for (int i = 0; i < m.grid.n; ++i) {
    double rho = (m.values[i + 1] - m.values[i]) / (kTwoPi * m.grid.center(i) * h);
    sup = std::max(sup, rho);
  }
  return sup;
}

// Largest relative dip of m below monotone (negative density indicator).
double monotonicity_violation(const fields::CumulativeMass& m) {
  double scale = std::max(std::abs(m.total()), 1e-300);
  double worst = 0.0;
  for (int i = 0; i < m.grid.n; ++i)
    worst = std::max(worst, -(m.values[i + 1] - m.values[i]) / scale);
  return worst;
}

bool finite_state(const fields::CumulativeMass& m) {
  for (double v : m.values)
    if (!std::isfinite(v)) return false;
  return true;
}

// Shared semi-implicit machinery: the linear part m_rr + beta(r) m_r / r
// (+ zeroth-order gamma m) goes implicit via a tridiagonal solve, the
// remaining nonlinearity is advanced explicitly.
struct LinearPart {
  double beta_num = -1.0;  // coefficient of m_r / r
  double gamma = 0.0;      // zeroth-order coefficient
};

fields::CumulativeMass semi_implicit_step(const fields::CumulativeMass& m,
                                          double dt, const LinearPart& lin,
                                          std::span<const double> explicit_rhs,
                                          double left_value, double right_value) {
  const int n = m.grid.n;
  const double h = m.grid.h();
  const int k = n - 1;  // interior unknowns
  if (k <= 0) {
    std::vector<double> out{left_value, right_value};
    return fields::CumulativeMass(m.grid, std::move(out));
  }
  std::vector<double> lower(k - 1), diagv(k), upper(k - 1), rhs(k);
  for (int i = 1; i <= k; ++i) {
    double r = m.grid.edge(i);
    double a = 1.0 / (h * h);
    double b = lin.beta_num / (r * 2.0 * h);
    double lo = dt * (a - b);
    double up = dt * (a + b);
    double di = 1.0 - dt * (-2.0 * a + lin.gamma);
    rhs[i - 1] = m.values[i] + dt * explicit_rhs[i];
    if (i == 1)
      rhs[i - 1] += lo * left_value;
    else
      lower[i - 2] = -lo;
    if (i == k)
      rhs[i - 1] += up * right_value;
    else
      upper[i - 1] = -up;
    diagv[i - 1] = di;
  }
  numerics::solve_tridiagonal(lower, diagv, upper, rhs);
  std::vector<double> out(n + 1);
  out[0] = left_value;
  out[n] = right_value;
  for (int i = 1; i <= k; ++i) out[i] = rhs[i - 1];
  return fields::CumulativeMass(m.grid, std::move(out));
}
}  // namespace

void SolverConfig::validate() const {
  if (!(dt_min < dt_initial))
    throw std::invalid_argument("SolverConfig: dt_min must be below dt_initial");
  if (!(cfl_factor > 0.0 && cfl_factor <= 1.0))
    throw std::invalid_argument("SolverConfig: cfl_factor in (0, 1]");
  if (!(blowup_sup_threshold > 0.0))
    throw std::invalid_argument("SolverConfig: blowup_sup_threshold must be positive");
}

std::vector<double> concentration_gradient(const fields::CumulativeMass& m) {
  const int n = m.grid.n;
  std::vector<double> cr(n);
  for (int i = 0; i < n; ++i) {
    double mid = 0.5 * (m.values[i] + m.values[i + 1]);
    cr[i] = -mid / (kTwoPi * m.grid.center(i));
  }
  return cr;
}

std::vector<double> mass_pde_rhs(const fields::CumulativeMass& m,
                                 bool pure_diffusion) {
  const int n = m.grid.n;
  const double h = m.grid.h();
  std::vector<double> rhs(n + 1, 0.0);
  for (int i = 1; i < n; ++i) {
    double r = m.grid.edge(i);
    double second = (m.values[i + 1] - 2.0 * m.values[i] + m.values[i - 1]) / (h * h);
    double first = (m.values[i + 1] - m.values[i - 1]) / (2.0 * h);
    rhs[i] = second - first / r;
    if (!pure_diffusion) rhs[i] += m.values[i] * first / (kTwoPi * r);
  }
  return rhs;
}

fields::CumulativeMass step_mass_pde(const fields::CumulativeMass& m, double dt,
                                     const SolverConfig& config) {
  const double h = m.grid.h();
  if (config.scheme == Scheme::explicit_euler) {
    if (dt > config.cfl_factor * h * h / 2.0)
      throw std::invalid_argument("step_mass_pde: dt above explicit stability bound");
    auto rhs = mass_pde_rhs(m, config.pure_diffusion);
    std::vector<double> out(m.values);
    for (int i = 1; i < m.grid.n; ++i) out[i] += dt * rhs[i];
    return fields::CumulativeMass(m.grid, std::move(out));
  }
  // Semi-implicit: m_rr - m_r / r implicit, aggregation explicit.
  const int n = m.grid.n;
  std::vector<double> expl(n + 1, 0.0);
  if (!config.pure_diffusion) {
    for (int i = 1; i < n; ++i) {
      double r = m.grid.edge(i);
      double first = (m.values[i + 1] - m.values[i - 1]) / (2.0 * h);
      expl[i] = m.values[i] * first / (kTwoPi * r);
    }
  }
  return semi_implicit_step(m, dt, {-1.0, 0.0}, expl, 0.0, m.total());
}

std::vector<double> hv_rhs(const fields::CumulativeMass& m) {
  const int n = m.grid.n;
  const double h = m.grid.h();
  std::vector<double> rhs(n + 1, 0.0);
  for (int i = 1; i < n; ++i) {
    double r = m.grid.edge(i);
    double second = (m.values[i + 1] - 2.0 * m.values[i] + m.values[i - 1]) / (h * h);
    double first = (m.values[i + 1] - m.values[i - 1]) / (2.0 * h);
    rhs[i] = second + (m.values[i] / kTwoPi - 1.0) * first / r + m.values[i];
  }
  return rhs;
}

fields::CumulativeMass step_hv(const fields::CumulativeMass& m, double dt,
                               const SolverConfig& config) {
  const double h = m.grid.h();
  const int n = m.grid.n;
  if (config.scheme == Scheme::explicit_euler) {
    if (dt > config.cfl_factor * h * h / 2.0)
      throw std::invalid_argument("step_hv: dt above explicit stability bound");
    auto rhs = hv_rhs(m);
    std::vector<double> out(m.values);
    for (int i = 1; i < n; ++i) out[i] += dt * rhs[i];
    out[n] = 0.0;
    return fields::CumulativeMass(m.grid, std::move(out));
  }
  // Linear part m_rr - m_r / r + m implicit; the m m_r / (2 pi r) coupling
  // stays explicit.
  std::vector<double> expl(n + 1, 0.0);
  for (int i = 1; i < n; ++i) {
    double r = m.grid.edge(i);
    double first = (m.values[i + 1] - m.values[i - 1]) / (2.0 * h);
    expl[i] = m.values[i] * first / (kTwoPi * r);
  }
  return semi_implicit_step(m, dt, {-1.0, 1.0}, expl, 0.0, 0.0);
}

namespace {
diag::DiagnosticRecord make_record(double t, const fields::CumulativeMass& m,
                                   const SolverConfig& config) {
  diag::DiagnosticRecord rec;
  rec.t = t;
  auto rho = fields::density_from_cumulative(m, fields::NegativePolicy::clamp);
  rec.mass = m.total();
  rec.second_moment = diag::second_moment(rho);
  rec.entropy = diag::entropy(rho);
  rec.free_energy = diag::free_energy_ks(rho);
  rec.sup_density = sup_density(m);
  if (rho.values.front() > 0.0) {
    auto fit = stationary::fit_bubble(rho);
    rec.lambda_hat = fit.lambda_hat;
  }
  if (config.heavy_diagnostics) {
    rec.loghls_deficit = diag::loghls_deficit(rho);
    std::vector<double> root(rho.values.size());
    for (std::size_t i = 0; i < root.size(); ++i) root[i] = std::sqrt(rho.values[i]);
    rec.gns_deficit = diag::gns_deficit(fields::RadialDensity(rho.grid, std::move(root)));
  }
  return rec;
}

// dt cap: parabolic bound for the explicit scheme, advective bound for the
// explicitly treated aggregation term otherwise.
double dt_cap(const fields::CumulativeMass& m, const SolverConfig& config) {
  const double h = m.grid.h();
  if (config.scheme == Scheme::explicit_euler) return config.cfl_factor * h * h / 2.0;
  if (config.pure_diffusion) return config.t_end;
  double vmax = 0.0;
  for (int i = 1; i < m.grid.n; ++i)
    vmax = std::max(vmax, std::abs(m.values[i]) / (kTwoPi * m.grid.edge(i)));
  if (vmax <= 0.0) return config.t_end;
  return config.cfl_factor * h / vmax;
}
}  // namespace

Trajectory run(const fields::CumulativeMass& m0, const SolverConfig& config) {
  config.validate();
  Trajectory traj;
  fields::CumulativeMass state = m0;
  double t = 0.0;
  double dt = config.dt_initial;
  int quiet = 0;
  long step_index = 0;

  auto record = [&](double time, const fields::CumulativeMass& s) {
    traj.times.push_back(time);
    traj.states.push_back(s);
    traj.records.push_back(make_record(time, s, config));
  };
  record(0.0, state);

  traj.termination = Termination::reached_t_end;
  while (t < config.t_end) {
    if (sup_density(state) > config.blowup_sup_threshold) {
      traj.termination = Termination::blowup_detected;
      break;
    }
    double stable_dt = std::min(dt, dt_cap(state, config));
    if (stable_dt < config.dt_min) {
      traj.termination = Termination::dt_underflow;
      break;
    }
    double step_dt = std::min(stable_dt, config.t_end - t);
    fields::CumulativeMass next = step_mass_pde(state, step_dt, config);
    bool ok = finite_state(next) &&
              monotonicity_violation(next) <= config.nonneg_tol;
    if (!ok) {
      if (dt * 0.5 < config.dt_min) {
        traj.termination = Termination::dt_underflow;
        break;
      }
      dt *= 0.5;
      quiet = 0;
      continue;
    }
    state = std::move(next);
    t += step_dt;
    ++step_index;
    if (++quiet >= config.quiet_steps_to_double) {
      dt = std::min(dt * 2.0, config.dt_initial);
      quiet = 0;
    }
    if (step_index % config.record_every == 0 || t >= config.t_end)
      record(t, state);
  }
  if (traj.times.back() != t) record(t, state);
  traj.t_final = t;
  return traj;
}

std::vector<double> w_from_m(const fields::CumulativeMass& m) {
  const int n = m.grid.n;
  const double h = m.grid.h();
  std::vector<double> w(n + 1);
  w[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    double a = m.grid.edge(i) * m.values[i];
    double b = m.grid.edge(i + 1) * m.values[i + 1];
    w[i + 1] = w[i] + 0.5 * (a + b) * h;
  }
  return w;
}

double SelfSimilarFrame::tau(double t) const {
  if (!(t < T)) throw std::invalid_argument("SelfSimilarFrame: requires t < T");
  return -std::log(T - t);
}

SelfSimilarSlice to_selfsimilar(std::span<const double> w_edges,
                                const fields::RadialGrid& grid, double t,
                                const SelfSimilarFrame& frame) {
  if (!(t < frame.T)) throw std::invalid_argument("to_selfsimilar: requires t < T");
  if (w_edges.size() != static_cast<std::size_t>(grid.n + 1))
    throw std::invalid_argument("to_selfsimilar: w must live on edges");
  const double gap = frame.T - t;
  const double root = std::sqrt(gap);
  SelfSimilarSlice out;
  out.tau = -std::log(gap);
  out.W.resize(frame.y.size());
  const double h = grid.h();
  for (std::size_t j = 0; j < frame.y.size(); ++j) {
    double r = frame.y[j] * root;
    if (r < 0.0 || r > grid.R) {
      out.W[j] = std::nan("");
      continue;
    }
    double pos = r / h;
    int i = std::min(static_cast<int>(pos), grid.n - 1);
    double frac = pos - i;
    out.W[j] = ((1.0 - frac) * w_edges[i] + frac * w_edges[i + 1]) / gap;
  }
  return out;
}

double estimate_blowup_time(const Trajectory& trajectory) {
  const auto& recs = trajectory.records;
  if (recs.size() < 3)
    throw std::invalid_argument("estimate_blowup_time: too few records");
  std::size_t take = std::min<std::size_t>(20, recs.size());
  std::vector<double> ts, inv, logsup;
  for (std::size_t i = recs.size() - take; i < recs.size(); ++i) {
    if (recs[i].sup_density <= 0.0) continue;
    ts.push_back(recs[i].t);
    inv.push_back(1.0 / recs[i].sup_density);
    logsup.push_back(std::log(recs[i].sup_density));
  }
  auto fit = numerics::fit_line(ts, inv);
  if (!(fit.slope < 0.0))
    throw std::invalid_argument("estimate_blowup_time: sup density not growing");
  double seed = -fit.intercept / fit.slope;
  // The linear extrapolation of 1/sup undershoots T whenever sup grows
  // faster than (T - t)^{-1} (1/sup is then convex in t). Refine by picking
  // the T that makes log sup most linear in log(T - t) over the window.
  double t_last = ts.back();
  double span = t_last - ts.front();
  double lo = std::max(seed, t_last) - t_last + 1e-6 * span;
  double hi = 2.0 * span;
  auto misfit = [&](double offset) {
    double T = t_last + offset;
    std::vector<double> lx(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) lx[i] = std::log(T - ts[i]);
    auto line = numerics::fit_line(lx, logsup);
    double sse = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      double r = logsup[i] - (line.intercept + line.slope * lx[i]);
      sse += r * r;
    }
    return sse;
  };
  for (int it = 0; it < 120; ++it) {
    double m1 = lo + (hi - lo) / 3.0;
    double m2 = hi - (hi - lo) / 3.0;
    if (misfit(m1) < misfit(m2))
      hi = m2;
    else
      lo = m1;
  }
  return t_last + 0.5 * (lo + hi);
}

SIndicatorResult s_indicator(const Trajectory& trajectory, double t_est) {
  if (trajectory.termination != Termination::blowup_detected)
    throw std::invalid_argument("s_indicator: trajectory has no blow-up");
  SIndicatorResult out;
  for (const auto& rec : trajectory.records) {
    if (rec.t >= t_est) continue;
    out.t.push_back(rec.t);
    out.S.push_back((t_est - rec.t) * rec.sup_density);
  }
  if (out.t.size() < 3)
    throw std::invalid_argument("s_indicator: too few records below T");
  // Final decade of T_est - t, in log-log coordinates.
  double last_gap = t_est - out.t.back();
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < out.t.size(); ++i) {
    double gapi = t_est - out.t[i];
    if (gapi <= 10.0 * last_gap) {
      lx.push_back(std::log(gapi));
      ly.push_back(std::log(std::max(out.S[i], 1e-300)));
    }
  }
  if (lx.size() >= 2) {
    out.loglog_slope = numerics::fit_line(lx, ly).slope;
    out.type2 = out.loglog_slope < -0.02;
  }
  return out;
}

diag::RateCheck second_moment_rate_check(const Trajectory& trajectory) {
  std::vector<double> m2;
  m2.reserve(trajectory.records.size());
  for (const auto& rec : trajectory.records) m2.push_back(rec.second_moment);
  double mass_value = trajectory.records.front().mass;
  auto check = diag::second_moment_rate_check(trajectory.times, m2, mass_value);
  auto rho = fields::density_from_cumulative(trajectory.states.back(),
                                             fields::NegativePolicy::clamp);
  check.boundary_contaminated = diag::boundary_contaminated(rho);
  return check;
}

}  // namespace kslab::ks
