#include "kslab/entropy_toolkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kslab/numerics.hpp"

namespace kslab::entropy {

namespace {
constexpr double kDensityFloor = 1e-300;
constexpr double kSupportCut = 1e-14;  // below this a cell carries no measure

void check_same_grid(const Density1D& a, const Density1D& b) {
  if (!(a.grid == b.grid))
    throw std::invalid_argument("density grids must match");
}
}  // namespace

Grid1D::Grid1D(double left, double right, int cells)
    : x_left(left), dx((right - left) / cells), n(cells) {
  if (cells <= 0) throw std::invalid_argument("Grid1D: cells must be positive");
  if (!(right > left)) throw std::invalid_argument("Grid1D: empty interval");
}

Density1D Density1D::normalized(Grid1D g, std::vector<double> v) {
  if (static_cast<int>(v.size()) != g.n)
    throw std::invalid_argument("Density1D: expected one value per cell");
  double total = 0.0;
  for (double x : v) {
    if (!(x >= 0.0)) throw std::invalid_argument("Density1D: negative value");
    total += x * g.dx;
  }
  if (!(total > 0.0)) throw std::invalid_argument("Density1D: zero mass");
  for (double& x : v) x /= total;
  Density1D d;
  d.grid = g;
  d.values = std::move(v);
  return d;
}

PotentialSpec PotentialSpec::make(Grid1D grid, std::function<double(double)> V,
                                  std::function<double(double)> Vp,
                                  std::function<double(double)> Vpp) {
  if (!V || !Vp) throw std::invalid_argument("PotentialSpec: V and V' required");
  PotentialSpec spec;
  spec.grid = grid;
  spec.V = std::move(V);
  spec.Vp = std::move(Vp);
  spec.Vpp = std::move(Vpp);
  double z = 0.0;
  for (int i = 0; i < grid.n; ++i) z += std::exp(-spec.V(grid.center(i))) * grid.dx;
  if (!(z > 0.0) || !std::isfinite(z))
    throw std::invalid_argument("PotentialSpec: e^{-V} not integrable on the grid");
  spec.log_normalization = std::log(z);
  return spec;
}

Density1D PotentialSpec::reference() const {
  std::vector<double> v(grid.n);
  for (int i = 0; i < grid.n; ++i)
    v[i] = std::exp(-V(grid.center(i)) - log_normalization);
  return Density1D::normalized(grid, std::move(v));
}

double PotentialSpec::second_derivative(double x) const {
  if (Vpp) return Vpp(x);
  double h = 1e-5 * (1.0 + std::abs(x));
  return (Vp(x + h) - Vp(x - h)) / (2.0 * h);
}

FpTrajectory fp_run(const Density1D& rho0, const PotentialSpec& spec,
                    double t_end, double dt, int record_every) {
  if (!(rho0.grid == spec.grid))
    throw std::invalid_argument("fp_run: density and potential grids differ");
  const Grid1D& g = rho0.grid;
  const double h = g.dx;
  // Edge factors of the symmetrized flux F = e^{-V_edge} (rho e^V)' :
  // F_{i+1/2} = (ap rho_{i+1} - am rho_i) / h, with a = e^{V_cell - V_edge}.
  const int n = g.n;
  std::vector<double> ap(n - 1), am(n - 1);
  double stiff = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    double vl = spec.V(g.center(i));
    double vr = spec.V(g.center(i + 1));
    double ve = 0.5 * (vl + vr);
    am[i] = std::exp(vl - ve);
    ap[i] = std::exp(vr - ve);
    stiff = std::max(stiff, am[i] + ap[i]);
  }
  if (dt > h * h / stiff)
    throw std::invalid_argument("fp_run: dt above explicit stability bound");

  const Density1D ref = spec.reference();
  FpTrajectory traj;
  Density1D state = rho0;
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.states.push_back(state);
    traj.relative_entropies.push_back(relative_entropy(state, ref));
    traj.fisher_informations.push_back(fisher_information(state, ref));
  };
  record(0.0);

  std::vector<double> flux(n + 1, 0.0);
  double t = 0.0;
  long step = 0;
  while (t < t_end) {
    double sdt = std::min(dt, t_end - t);
    for (int i = 0; i + 1 < n; ++i)
      flux[i + 1] = (ap[i] * state.values[i + 1] - am[i] * state.values[i]) / h;
    for (int i = 0; i < n; ++i)
      state.values[i] += sdt / h * (flux[i + 1] - flux[i]);
    t += sdt;
    ++step;
    if (step % record_every == 0 || t >= t_end) record(t);
  }
  return traj;
}

double relative_entropy(const Density1D& rho, const Density1D& reference) {
  check_same_grid(rho, reference);
  double s = 0.0;
  for (int i = 0; i < rho.grid.n; ++i) {
    double p = rho.values[i];
    if (p <= 0.0) continue;
    double q = reference.values[i];
    if (q <= 0.0)
      throw std::invalid_argument("relative_entropy: reference vanishes on support");
    s += p * std::log(p / q) * rho.grid.dx;
  }
  return s;
}

double fisher_information(const Density1D& rho, const Density1D& reference) {
  check_same_grid(rho, reference);
  const int n = rho.grid.n;
  const double h = rho.grid.dx;
  std::vector<double> logratio(n);
  for (int i = 0; i < n; ++i) {
    double p = std::max(rho.values[i], kDensityFloor);
    double q = reference.values[i];
    if (q <= 0.0 && rho.values[i] > kSupportCut)
      throw std::invalid_argument("fisher_information: reference vanishes on support");
    logratio[i] = std::log(p / std::max(q, kDensityFloor));
  }
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    if (rho.values[i] < kSupportCut) continue;  // carries no measure
    double d;
    if (i == 0)
      d = (logratio[1] - logratio[0]) / h;
    else if (i == n - 1)
      d = (logratio[n - 1] - logratio[n - 2]) / h;
    else
      d = (logratio[i + 1] - logratio[i - 1]) / (2.0 * h);
    s += rho.values[i] * d * d * h;
  }
  return s;
}

double ckp_deficit(const Density1D& rho, const Density1D& reference) {
  check_same_grid(rho, reference);
  double l1 = 0.0;
  for (int i = 0; i < rho.grid.n; ++i)
    l1 += std::abs(rho.values[i] - reference.values[i]) * rho.grid.dx;
  return relative_entropy(rho, reference) - 0.5 * l1 * l1;
}

double logsob_deficit(const Density1D& rho, const PotentialSpec& spec,
                      double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("logsob_deficit: lambda > 0");
  Density1D ref = spec.reference();
  return fisher_information(rho, ref) / (2.0 * lambda) - relative_entropy(rho, ref);
}

double bakry_emery_lambda(const PotentialSpec& spec, double a, double b,
                          int samples) {
  if (!(b > a) || samples < 2)
    throw std::invalid_argument("bakry_emery_lambda: bad interval");
  double lambda = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    double x = a + (b - a) * i / (samples - 1);
    lambda = std::min(lambda, spec.second_derivative(x));
  }
  return lambda;
}

double holley_stroock_lambda(double lambda0, double oscillation) {
  if (!(oscillation >= 0.0))
    throw std::invalid_argument("holley_stroock_lambda: osc >= 0");
  return lambda0 * std::exp(-oscillation);
}

double decay_rate_fit(const FpTrajectory& trajectory) {
  const auto& H = trajectory.relative_entropies;
  if (H.size() < 8) throw std::invalid_argument("decay_rate_fit: too few records");
  if (!(H.front() > 1e-12))
    throw std::invalid_argument("decay_rate_fit: initial entropy below noise floor");
  if (!(H.back() < 1e-2 * H.front()))
    throw std::invalid_argument("decay_rate_fit: needs >= 2 decades of decay");
  for (std::size_t i = 1; i < H.size(); ++i)
    if (H[i] > H[i - 1] * (1.0 + 1e-8) && H[i] > 1e-13)
      throw std::invalid_argument("decay_rate_fit: entropy not monotone");
  // Tail window: skip the first quarter, stay above the noise floor.
  std::vector<double> ts, ys;
  for (std::size_t i = H.size() / 4; i < H.size(); ++i) {
    if (H[i] < std::max(1e-12, 1e-8 * H.front())) break;
    ts.push_back(trajectory.times[i]);
    ys.push_back(std::log(H[i]));
  }
  if (ts.size() < 4) throw std::invalid_argument("decay_rate_fit: window too short");
  return -numerics::fit_line(ts, ys).slope;
}

double talagrand_deficit(const Density1D& rho, const PotentialSpec& spec,
                         double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("talagrand_deficit: hypothesis requires lambda > 0");
  Density1D ref = spec.reference();
  double H = relative_entropy(rho, ref);
  return std::sqrt(2.0 * H / lambda) - w2_grid(rho, ref);
}

double hwi_deficit(const Density1D& rho0, const Density1D& rho1,
                   const PotentialSpec& spec, double lambda) {
  check_same_grid(rho0, rho1);
  Density1D ref = spec.reference();
  double h0 = relative_entropy(rho0, ref);
  double h1 = relative_entropy(rho1, ref);
  double i0 = fisher_information(rho0, ref);
  double w = w2_grid(rho0, rho1);
  return h1 + w * std::sqrt(i0) - 0.5 * lambda * w * w - h0;
}

double interaction_energy(const jko::FreeEnergySpec& spec, const Density1D& rho) {
  const Grid1D& g = rho.grid;
  double e = 0.0;
  if (spec.entropy_coefficient != 0.0) {
    double s = 0.0;
    for (int i = 0; i < g.n; ++i) {
      double p = rho.values[i];
      if (p > 0.0) s += p * std::log(p) * g.dx;
    }
    e += spec.entropy_coefficient * s;
  }
  if (spec.has_potential()) {
    double s = 0.0;
    for (int i = 0; i < g.n; ++i) s += rho.values[i] * spec.potential(g.center(i)) * g.dx;
    e += s;
  }
  if (spec.has_interaction()) {
    double s = 0.0;
    for (int i = 0; i < g.n; ++i) {
      if (rho.values[i] == 0.0) continue;
      double row = 0.0;
      for (int j = 0; j < g.n; ++j)
        row += rho.values[j] * spec.interaction(g.center(i) - g.center(j));
      s += rho.values[i] * row;
    }
    e += 0.5 * s * g.dx * g.dx;
  }
  return e;
}

fields::QuantileDensity to_quantiles(const Density1D& rho, int K) {
  return fields::quantile_from_samples(rho.values, rho.grid.x_left, rho.grid.dx, K);
}

double w2_grid(const Density1D& a, const Density1D& b) {
  check_same_grid(a, b);
  int K = a.grid.n;
  return jko::w2(to_quantiles(a, K), to_quantiles(b, K));
}

double moment(const Density1D& rho, double beta) {
  double s = 0.0;
  for (int i = 0; i < rho.grid.n; ++i) {
    double x = rho.grid.center(i);
    s += std::pow(1.0 + x * x, beta) * rho.values[i] * rho.grid.dx;
  }
  return s;
}

}  // namespace kslab::entropy
