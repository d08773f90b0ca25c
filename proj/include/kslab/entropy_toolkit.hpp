#pragma once

#include <functional>
#include <vector>

#include "kslab/fields.hpp"
#include "kslab/jko1d.hpp"

namespace kslab::entropy {

// Uniform cell-centered 1D grid: centers x_left + (i + 1/2) dx.
struct Grid1D {
  double x_left = 0.0;
  double dx = 0.0;
  int n = 0;

  Grid1D() = default;
  Grid1D(double left, double right, int cells);
  double center(int i) const { return x_left + (i + 0.5) * dx; }
  double right() const { return x_left + n * dx; }
  bool operator==(const Grid1D&) const = default;
};

// Nonnegative grid density of unit mass.
struct Density1D {
  Grid1D grid;
  std::vector<double> values;

  static Density1D normalized(Grid1D g, std::vector<double> v);
};

// Confining potential with derivatives; e^{-V} is normalized on the grid at
// construction so the reference is a probability density.
struct PotentialSpec {
  Grid1D grid;
  std::function<double(double)> V;
  std::function<double(double)> Vp;
  std::function<double(double)> Vpp;  // optional; finite differences otherwise
  double log_normalization = 0.0;     // log int e^{-V}

  static PotentialSpec make(Grid1D grid, std::function<double(double)> V,
                            std::function<double(double)> Vp,
                            std::function<double(double)> Vpp = nullptr);
  Density1D reference() const;  // normalized e^{-V} samples
  double second_derivative(double x) const;
};

struct FpTrajectory {
  std::vector<double> times;
  std::vector<Density1D> states;
  std::vector<double> relative_entropies;
  std::vector<double> fisher_informations;
};

// Mass-conservative finite-volume update of rho_t = (rho_x + rho V_x)_x with
// no-flux walls. Fluxes use the symmetrized form e^{-V} (rho e^{V})_x, which
// makes the normalized e^{-V} an exact discrete fixed point.
FpTrajectory fp_run(const Density1D& rho0, const PotentialSpec& spec,
                    double t_end, double dt, int record_every = 16);

// H(rho | ref) = int rho log(rho / ref) >= 0; 0 log 0 = 0.
double relative_entropy(const Density1D& rho, const Density1D& reference);

// I(rho | ref) = int rho |d/dx log(rho / ref)|^2, centered differences.
double fisher_information(const Density1D& rho, const Density1D& reference);

// H - ||rho - ref||_1^2 / 2.
double ckp_deficit(const Density1D& rho, const Density1D& reference);

// (1 / 2 lambda) I - H against the spec's reference.
double logsob_deficit(const Density1D& rho, const PotentialSpec& spec,
                      double lambda);

// inf of V'' over a dense sampling of [a, b].
double bakry_emery_lambda(const PotentialSpec& spec, double a, double b,
                          int samples = 4096);

// lambda e^{-osc(v)} for a bounded perturbation v of the potential.
double holley_stroock_lambda(double lambda0, double oscillation);

// Least-squares slope of -log H over the tail of the trajectory. Requires at
// least two decades of monotone decay.
double decay_rate_fit(const FpTrajectory& trajectory);

// sqrt(2 H / lambda) - W2(rho, e^{-V}); W2 via quantiles at K = grid size.
double talagrand_deficit(const Density1D& rho, const PotentialSpec& spec,
                         double lambda);

// H(rho1) + W2 sqrt(I(rho0)) - (lambda / 2) W2^2 - H(rho0).
double hwi_deficit(const Density1D& rho0, const Density1D& rho1,
                   const PotentialSpec& spec, double lambda);

// Grid-form evaluation of the jko free energy (entropy + potential +
// pairwise interaction).
double interaction_energy(const jko::FreeEnergySpec& spec, const Density1D& rho);

fields::QuantileDensity to_quantiles(const Density1D& rho, int K);
double w2_grid(const Density1D& a, const Density1D& b);

// int (1 + x^2)^beta rho, for qualitative moment-boundedness checks.
double moment(const Density1D& rho, double beta);

}  // namespace kslab::entropy
