#include "kslab/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"
#include "kslab/burgers.hpp"
#include "kslab/diagnostics.hpp"
#include "kslab/entropy_toolkit.hpp"
#include "kslab/fields.hpp"
#include "kslab/jko1d.hpp"
#include "kslab/ks_radial.hpp"
#include "kslab/numerics.hpp"
#include "kslab/particles.hpp"
#include "kslab/rng.hpp"
#include "kslab/stationary.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace kslab::harness {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;

// ---------------------------------------------------------------- schemas --

using Schema = std::map<std::string, std::string>;  // key -> default

const std::map<std::string, Schema>& module_schemas() {
  static const std::map<std::string, Schema> schemas = {
      {"ks_radial",
       {{"mass_factor", "0.5"},      // mass = mass_factor * 8 pi
        {"sigma", "1.0"},            // gaussian width of the initial data
        {"initial", "gaussian"},     // gaussian | bubble-normalized
        {"radius", "20.0"},
        {"cells", "1024"},
        {"t_end", "1.0"},
        {"dt_initial", "1e-3"},
        {"dt_min", "1e-12"},
        {"cfl_factor", "0.8"},
        {"blowup_sup_threshold", "1e6"},
        {"scheme", "semi-implicit"},  // semi-implicit | explicit
        {"record_every", "16"},
        {"heavy_diagnostics", "false"},
        {"pure_diffusion", "false"}}},
      {"jko",
       {{"potential", "quadratic"},  // quadratic | none
        {"interaction", "none"},     // none | cubic
        {"entropy_coefficient", "1.0"},
        {"tau", "1e-2"},
        {"steps", "200"},
        {"quantiles", "256"},
        {"initial_mean", "1.5"},
        {"initial_sd", "0.6"},
        {"fp_compare", "false"},     // also run the dense-grid solver and
        {"fp_time", "0.5"}}},        // report W2 at fp_time
      {"fp",
       {{"sigma", "1.0"},            // V = x^2 / (2 sigma)
        {"x_left", "-9.0"},
        {"x_right", "10.0"},
        {"cells", "512"},
        {"dt_factor", "0.4"},        // dt = dt_factor h^2
        {"t_end", "4.0"},
        {"record_every", "200"},
        {"initial_mean", "1.0"},
        {"initial_sd", "1.0"}}},
      {"particles",
       {{"count_u", "10000"},
        {"count_v", "0"},
        {"mu", "0.5"},
        {"eta", "1.0"},
        {"chi", "0.0"},
        {"alpha", "0.3"},
        {"alpha_hat", "0.5"},
        {"dt", "1e-3"},
        {"t_end", "0.5"},
        {"record_every", "50"},
        {"init_radius", "0.0"}}},
      {"burgers",
       {{"profile", "neg-sine"},     // neg-sine | neg-linear
        {"samples", "8192"},
        {"fit_points", "12"}}},
      {"stationary",
       {{"lambda", "1.0"},
        {"ladder", "0.1,0.05,0.025"},
        {"eigen_h", "0.04,0.02,0.01"}}},
      {"sweeps",
       {{"family", "entropy"},       // entropy | loghls
        {"count", "500"},
        {"cells", "2048"},
        {"sigma", "1.0"}}},
  };
  return schemas;
}

// ------------------------------------------------------------- key access --

double get_num(const Scenario& s, const std::string& key) {
  const std::string& text = s.params.at(key);
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used])))
      ++used;
    if (used != text.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("scenario '" + s.name + "': key '" + key +
                      "' is not a number: '" + text + "'");
  }
}

int get_int(const Scenario& s, const std::string& key) {
  double v = get_num(s, key);
  int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError("scenario '" + s.name + "': key '" + key + "' must be an integer");
  return i;
}

bool get_bool(const Scenario& s, const std::string& key) {
  const std::string& v = s.params.at(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("scenario '" + s.name + "': key '" + key + "' must be a boolean");
}

std::vector<double> get_list(const Scenario& s, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(s.params.at(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("scenario '" + s.name + "': key '" + key +
                        "' has a non-numeric entry '" + item + "'");
    }
  }
  if (out.empty())
    throw ConfigError("scenario '" + s.name + "': key '" + key + "' is empty");
  return out;
}

void apply_defaults(Scenario& s) {
  auto it = module_schemas().find(s.module);
  if (it == module_schemas().end())
    throw ConfigError("scenario '" + s.name + "': unknown module '" + s.module + "'");
  for (const auto& [key, value] : it->second)
    s.params.emplace(key, value);
}

// --------------------------------------------------------------- writers --

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& schema_comment,
            const std::vector<std::string>& columns)
      : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open " + path.string());
    out_ << "# " << schema_comment << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
      out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
      out_ << format_double(values[i]) << (i + 1 < values.size() ? "," : "\n");
  }

 private:
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << j.dump(2) << "\n";
}

// ------------------------------------------------------------ ks scenario --

fields::CumulativeMass ks_initial_state(const Scenario& s) {
  const double mass = get_num(s, "mass_factor") * 8.0 * kPi;
  const double sigma = get_num(s, "sigma");
  fields::RadialGrid grid(get_int(s, "cells"), get_num(s, "radius"));
  const std::string& kind = s.params.at("initial");
  std::vector<double> m(grid.n + 1);
  if (kind == "gaussian") {
    for (int i = 0; i <= grid.n; ++i) {
      double r = grid.edge(i);
      m[i] = mass * (1.0 - std::exp(-r * r / (2.0 * sigma * sigma)));
    }
  } else if (kind == "bubble-normalized") {
    // Bubble cumulative rescaled so the ball carries exactly `mass`.
    double norm = stationary::bubble_cumulative({sigma}, grid.R);
    for (int i = 0; i <= grid.n; ++i)
      m[i] = mass / norm * stationary::bubble_cumulative({sigma}, grid.edge(i));
  } else {
    throw ConfigError("scenario '" + s.name + "': unknown initial '" + kind + "'");
  }
  m[0] = 0.0;
  return fields::CumulativeMass(grid, std::move(m));
}

void run_ks_scenario(const Scenario& s, const fs::path& dir) {
  ks::SolverConfig cfg;
  cfg.t_end = get_num(s, "t_end");
  cfg.dt_initial = get_num(s, "dt_initial");
  cfg.dt_min = get_num(s, "dt_min");
  cfg.cfl_factor = get_num(s, "cfl_factor");
  cfg.blowup_sup_threshold = get_num(s, "blowup_sup_threshold");
  cfg.record_every = get_int(s, "record_every");
  cfg.heavy_diagnostics = get_bool(s, "heavy_diagnostics");
  cfg.pure_diffusion = get_bool(s, "pure_diffusion");
  const std::string& scheme = s.params.at("scheme");
  if (scheme == "semi-implicit")
    cfg.scheme = ks::Scheme::semi_implicit;
  else if (scheme == "explicit")
    cfg.scheme = ks::Scheme::explicit_euler;
  else
    throw ConfigError("scenario '" + s.name + "': unknown scheme '" + scheme + "'");

  auto m0 = ks_initial_state(s);
  auto traj = ks::run(m0, cfg);

  CsvWriter diag_csv(dir / "diagnostics.csv", "kslab ks_radial diagnostics v1",
                     {"t", "mass", "second_moment", "entropy", "free_energy",
                      "sup_density", "lambda_hat", "loghls_deficit", "gns_deficit"});
  for (const auto& r : traj.records)
    diag_csv.row({r.t, r.mass, r.second_moment, r.entropy, r.free_energy,
                  r.sup_density, r.lambda_hat, r.loghls_deficit, r.gns_deficit});

  CsvWriter state_csv(dir / "final_state.csv", "kslab ks_radial final state v1",
                      {"r", "m"});
  const auto& last = traj.states.back();
  for (int i = 0; i <= last.grid.n; ++i)
    state_csv.row({last.grid.edge(i), last.values[i]});

  json summary;
  summary["scenario"] = s.name;
  summary["module"] = s.module;
  const char* term = traj.termination == ks::Termination::reached_t_end
                         ? "reached_t_end"
                         : traj.termination == ks::Termination::blowup_detected
                               ? "blowup_detected"
                               : "dt_underflow";
  summary["termination"] = term;
  summary["t_final"] = traj.t_final;
  double mass0 = traj.records.front().mass;
  double mass_drift = 0.0;
  for (const auto& r : traj.records)
    mass_drift = std::max(mass_drift, std::abs(r.mass - mass0) / mass0);
  summary["mass"] = mass0;
  summary["mass_relative_drift"] = mass_drift;
  double m2_0 = traj.records.front().second_moment;
  summary["second_moment_initial"] = m2_0;
  summary["second_moment_final"] = traj.records.back().second_moment;
  summary["second_moment_relative_drift"] =
      std::abs(traj.records.back().second_moment - m2_0) / m2_0;
  summary["sup_density_final"] = traj.records.back().sup_density;
  summary["lambda_hat_final"] = traj.records.back().lambda_hat;
  if (traj.termination == ks::Termination::blowup_detected) {
    double t_est = ks::estimate_blowup_time(traj);
    auto ind = ks::s_indicator(traj, t_est);
    summary["blowup_time_estimate"] = t_est;
    summary["s_indicator_type2"] = ind.type2;
    summary["s_indicator_loglog_slope"] = ind.loglog_slope;
  } else {
    auto rate = ks::second_moment_rate_check(traj);
    summary["second_moment_rate_predicted"] = rate.predicted_rate;
    summary["second_moment_rate_max_rel_deviation"] = rate.max_rel_deviation;
  }
  write_json(dir / "summary.json", summary);
}

// ----------------------------------------------------------- jko scenario --

// Gaussian quantiles via the Beasley-Springer-Moro-style rational inverse.
double gaussian_quantile(double p) {
  // Acklam's approximation; |error| < 1.2e-9 across (0, 1).
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > 1 - plow) return -gaussian_quantile(1 - p);
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

void run_jko_scenario(const Scenario& s, const fs::path& dir) {
  jko::FreeEnergySpec spec;
  spec.entropy_coefficient = get_num(s, "entropy_coefficient");
  const std::string& pot = s.params.at("potential");
  if (pot == "quadratic") {
    spec.potential = [](double x) { return 0.5 * x * x; };
    spec.potential_prime = [](double x) { return x; };
  } else if (pot != "none") {
    throw ConfigError("scenario '" + s.name + "': unknown potential '" + pot + "'");
  }
  const std::string& inter = s.params.at("interaction");
  if (inter == "cubic") {
    spec.interaction = [](double z) { return std::abs(z) * z * z / 3.0; };
    spec.interaction_prime = [](double z) { return z * std::abs(z); };
  } else if (inter != "none") {
    throw ConfigError("scenario '" + s.name + "': unknown interaction '" + inter + "'");
  }

  jko::JkoConfig cfg;
  cfg.tau = get_num(s, "tau");
  cfg.K = get_int(s, "quantiles");
  const int steps = get_int(s, "steps");
  const double mean = get_num(s, "initial_mean");
  const double sd = get_num(s, "initial_sd");

  fields::QuantileDensity rho0;
  rho0.q.resize(cfg.K);
  for (int k = 0; k < cfg.K; ++k)
    rho0.q[k] = mean + sd * gaussian_quantile((k + 0.5) / cfg.K);

  auto run = jko::run_jko(rho0, spec, cfg, steps);

  CsvWriter traj_csv(dir / "trajectory.csv", "kslab jko trajectory v1",
                     {"step", "t", "energy", "w2_increment", "cumulative_quadratic"});
  double t = 0.0, quad = 0.0;
  traj_csv.row({0.0, 0.0, run.energies[0], 0.0, 0.0});
  for (std::size_t n = 0; n < run.w2_increments.size(); ++n) {
    t += run.taus[n];
    quad += run.w2_increments[n] * run.w2_increments[n] / (2.0 * run.taus[n]);
    traj_csv.row({static_cast<double>(n + 1), t, run.energies[n + 1],
                  run.w2_increments[n], quad});
  }

  CsvWriter state_csv(dir / "final_state.csv", "kslab jko final state v1", {"p", "q"});
  const auto& last = run.states.back();
  for (int k = 0; k < last.K(); ++k) state_csv.row({last.level(k), last.q[k]});

  json summary;
  summary["scenario"] = s.name;
  summary["module"] = s.module;
  double e0 = run.energies.front();
  double emin = *std::min_element(run.energies.begin(), run.energies.end());
  bool per_step = true;
  for (std::size_t n = 0; n + 1 < run.energies.size(); ++n) {
    double lhs = run.energies[n + 1] +
                 run.w2_increments[n] * run.w2_increments[n] / (2.0 * run.taus[n]);
    if (lhs > run.energies[n] + 1e-8) per_step = false;
  }
  summary["per_step_inequality_ok"] = per_step;
  summary["energy_initial"] = e0;
  summary["energy_final"] = run.energies.back();
  summary["energy_min"] = emin;
  summary["quadratic_sum"] = run.quadratic_sum;
  summary["total_quadratic_estimate_ok"] = run.quadratic_sum <= e0 - emin + 1e-8;

  if (get_bool(s, "fp_compare")) {
    const double t_target = get_num(s, "fp_time");
    entropy::Grid1D g(-10.0, 11.0, 2048);
    auto fp_spec = entropy::PotentialSpec::make(
        g, [](double x) { return 0.5 * x * x; }, [](double x) { return x; },
        [](double) { return 1.0; });
    std::vector<double> v(g.n);
    for (int i = 0; i < g.n; ++i) {
      double x = g.center(i);
      v[i] = std::exp(-0.5 * (x - mean) * (x - mean) / (sd * sd));
    }
    auto fp0 = entropy::Density1D::normalized(g, std::move(v));
    double dt = 0.4 * g.dx * g.dx;
    auto fp_traj = entropy::fp_run(fp0, fp_spec, t_target, dt, 1 << 30);
    auto fp_quant = entropy::to_quantiles(fp_traj.states.back(), cfg.K);
    int jko_index = static_cast<int>(std::lround(t_target / cfg.tau));
    if (jko_index >= static_cast<int>(run.states.size()))
      jko_index = static_cast<int>(run.states.size()) - 1;
    summary["fp_compare_time"] = t_target;
    summary["w2_vs_fp"] = jko::w2(run.states[jko_index], fp_quant);
  }
  write_json(dir / "summary.json", summary);
}

// ------------------------------------------------------------ fp scenario --

void run_fp_scenario(const Scenario& s, const fs::path& dir) {
  entropy::Grid1D g(get_num(s, "x_left"), get_num(s, "x_right"), get_int(s, "cells"));
  const double sigma = get_num(s, "sigma");
  auto spec = entropy::PotentialSpec::make(
      g, [sigma](double x) { return 0.5 * x * x / sigma; },
      [sigma](double x) { return x / sigma; }, [sigma](double) { return 1.0 / sigma; });
  std::vector<double> v(g.n);
  const double mean = get_num(s, "initial_mean");
  const double sd = get_num(s, "initial_sd");
  for (int i = 0; i < g.n; ++i) {
    double x = g.center(i);
    v[i] = std::exp(-0.5 * (x - mean) * (x - mean) / (sd * sd));
  }
  auto rho0 = entropy::Density1D::normalized(g, std::move(v));
  double dt = get_num(s, "dt_factor") * g.dx * g.dx;
  auto traj = entropy::fp_run(rho0, spec, get_num(s, "t_end"), dt,
                              get_int(s, "record_every"));

  CsvWriter traj_csv(dir / "trajectory.csv", "kslab fp trajectory v1",
                     {"t", "relative_entropy", "fisher_information"});
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    traj_csv.row({traj.times[i], traj.relative_entropies[i],
                  traj.fisher_informations[i]});

  CsvWriter state_csv(dir / "final_state.csv", "kslab fp final state v1",
                      {"x", "rho"});
  for (int i = 0; i < g.n; ++i)
    state_csv.row({g.center(i), traj.states.back().values[i]});

  json summary;
  summary["scenario"] = s.name;
  summary["module"] = s.module;
  double lambda = entropy::bakry_emery_lambda(spec, g.x_left, g.right());
  double rate = entropy::decay_rate_fit(traj);
  summary["bakry_emery_lambda"] = lambda;
  summary["fitted_decay_rate"] = rate;
  summary["expected_decay_rate"] = 2.0 * lambda;
  summary["rate_ratio"] = rate / (2.0 * lambda);
  summary["relative_entropy_initial"] = traj.relative_entropies.front();
  summary["relative_entropy_final"] = traj.relative_entropies.back();
  write_json(dir / "summary.json", summary);
}

// ----------------------------------------------------- particles scenario --

void run_particles_scenario(const Scenario& s, const fs::path& dir) {
  particles::ParticleState state;
  state.config.mu = get_num(s, "mu");
  state.config.eta = get_num(s, "eta");
  state.config.chi = get_num(s, "chi");
  state.config.alpha = get_num(s, "alpha");
  state.config.alpha_hat = get_num(s, "alpha_hat");
  const int count_u = get_int(s, "count_u");
  const int count_v = get_int(s, "count_v");
  const double r0 = get_num(s, "init_radius");
  rng::Stream init(rng::substream(s.seed, 0xC0FFEE));
  auto place = [&](int count, std::vector<particles::Vec2>& out) {
    for (int k = 0; k < count; ++k) {
      if (r0 <= 0.0) {
        out.push_back({0.0, 0.0});
      } else {
        double r = r0 * std::sqrt(init.uniform());
        double th = init.uniform(0.0, 2.0 * kPi);
        out.push_back({r * std::cos(th), r * std::sin(th)});
      }
    }
  };
  place(count_u, state.u_positions);
  place(count_v, state.v_positions);

  auto run = particles::run_particles(state, get_num(s, "dt"), get_num(s, "t_end"),
                                      s.seed, get_int(s, "record_every"));

  CsvWriter traj_csv(dir / "trajectory.csv", "kslab particles trajectory v1",
                     {"t", "mass_u", "mass_v", "centroid_x", "centroid_y",
                      "second_moment_u", "msd_u"});
  for (const auto& rec : run.records)
    traj_csv.row({rec.t, rec.mass_u, rec.mass_v, rec.centroid_u.x, rec.centroid_u.y,
                  rec.second_moment_u, rec.msd_u});

  CsvWriter state_csv(dir / "final_state.csv", "kslab particles final state v1",
                      {"species", "x", "y"});
  for (const auto& p : run.final_state.u_positions) state_csv.row({0.0, p.x, p.y});
  for (const auto& p : run.final_state.v_positions) state_csv.row({1.0, p.x, p.y});

  json summary;
  summary["scenario"] = s.name;
  summary["module"] = s.module;
  const auto& last = run.records.back();
  summary["t_final"] = last.t;
  summary["mass_u"] = last.mass_u;
  summary["mass_v"] = last.mass_v;
  double slope = last.t > 0.0 ? last.msd_u / last.t : 0.0;
  summary["msd_slope"] = slope;
  summary["expected_msd_slope"] = 4.0 * state.config.mu;
  summary["msd_standard_error"] =
      4.0 * state.config.mu / std::sqrt(static_cast<double>(std::max(count_u, 1)));
  write_json(dir / "summary.json", summary);
}

// ------------------------------------------------------- burgers scenario --

void run_burgers_scenario(const Scenario& s, const fs::path& dir) {
  const std::string& profile = s.params.at("profile");
  burgers::BurgersProblem problem;
  if (profile == "neg-sine") {
    problem = burgers::BurgersProblem::closed_form(
        [](double x) { return -std::sin(x); },
        [](double x) { return -std::cos(x); }, -kPi, kPi);
  } else if (profile == "neg-linear") {
    problem = burgers::BurgersProblem::closed_form(
        [](double x) { return -x; }, [](double) { return -1.0; }, -4.0, 4.0);
  } else {
    throw ConfigError("scenario '" + s.name + "': unknown profile '" + profile + "'");
  }
  auto shock = burgers::shock_time(problem, get_int(s, "samples"));
  const int fit_points = get_int(s, "fit_points");
  std::vector<double> times;
  for (int j = 0; j < fit_points; ++j)
    times.push_back(shock.T * (1.0 - std::pow(10.0, -0.25 * j - 0.5)));

  CsvWriter traj_csv(dir / "trajectory.csv", "kslab burgers gradient growth v1",
                     {"t", "sup_ux"});
  for (double t : times) traj_csv.row({t, burgers::sup_gradient(problem, t)});

  json summary;
  summary["scenario"] = s.name;
  summary["module"] = s.module;
  summary["shock_time"] = shock.T;
  summary["x_m"] = shock.x_m;
  summary["x0"] = shock.x0;
  summary["rate_slope"] = burgers::blowup_rate_fit(problem, times);
  json profiles = json::array();
  for (int i : {0, 1}) {
    double alpha = burgers::selfsimilar_exponent(i);
    std::vector<double> lx, ly;
    for (double y = 1e2; y <= 1e4; y *= 1.5) {
      lx.push_back(std::log(y));
      ly.push_back(std::log(std::abs(burgers::profile_solve(-y, alpha, 1.0))));
    }
    json p;
    p["alpha"] = alpha;
    p["farfield_slope"] = numerics::fit_line(lx, ly).slope;
    p["expected_slope"] = alpha / (alpha + 1.0);
    profiles.push_back(p);
  }
  summary["profiles"] = profiles;
  write_json(dir / "summary.json", summary);
}

// ---------------------------------------------------- stationary scenario --

void run_stationary_scenario(const Scenario& s, const fs::path& dir) {
  auto ladder = get_list(s, "ladder");
  const double lambda = get_num(s, "lambda");

  CsvWriter res_csv(dir / "residuals.csv", "kslab stationary residuals v1",
                    {"h", "liouville_residual", "bubble_rhs_residual"});
  std::vector<double> liou, bub;
  for (double h : ladder) {
    double lr = stationary::liouville_residual(h);
    fields::RadialGrid g(static_cast<int>(10.0 / h), 10.0);
    auto m = stationary::bubble_cumulative_on_grid({lambda}, g);
    auto rhs = ks::mass_pde_rhs(m);
    double br = 0.0;
    for (double v : rhs) br = std::max(br, std::abs(v));
    res_csv.row({h, lr, br});
    liou.push_back(lr);
    bub.push_back(br);
  }

  auto eigen_h = get_list(s, "eigen_h");
  CsvWriter eig_csv(dir / "eigen_residuals.csv", "kslab laguerre residuals v1",
                    {"k", "h", "residual", "norm_quadrature", "norm_closed_form"});
  json eigen_orders = json::array();
  for (int k : {0, 1, 2}) {
    std::vector<double> res;
    for (double h : eigen_h) {
      auto chk = stationary::laguerre_eigen_check(k, h);
      eig_csv.row({static_cast<double>(k), h, chk.eigen_residual,
                   chk.norm_quadrature, chk.norm_closed_form});
      res.push_back(chk.eigen_residual);
    }
    json jk;
    jk["k"] = k;
    for (std::size_t i = 0; i + 1 < res.size(); ++i)
      jk["orders"].push_back(std::log2(res[i] / res[i + 1]));
    eigen_orders.push_back(jk);
  }

  json summary;
  summary["scenario"] = s.name;
  summary["module"] = s.module;
  auto orders_of = [](const std::vector<double>& r) {
    json arr = json::array();
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
      arr.push_back(std::log2(r[i] / r[i + 1]));
    return arr;
  };
  summary["liouville_orders"] = orders_of(liou);
  summary["bubble_rhs_orders"] = orders_of(bub);
  summary["eigen_orders"] = eigen_orders;
  write_json(dir / "summary.json", summary);
}

// -------------------------------------------------------- sweeps scenario --

void run_sweeps_scenario(const Scenario& s, const fs::path& dir) {
  const std::string& family = s.params.at("family");
  const int count = get_int(s, "count");
  json summary;
  summary["scenario"] = s.name;
  summary["module"] = s.module;
  if (family == "entropy") {
    entropy::Grid1D g(-10.0, 11.0, get_int(s, "cells"));
    const double sigma = get_num(s, "sigma");
    auto spec = entropy::PotentialSpec::make(
        g, [sigma](double x) { return 0.5 * x * x / sigma; },
        [sigma](double x) { return x / sigma; },
        [sigma](double) { return 1.0 / sigma; });
    auto ref = spec.reference();
    double lambda = entropy::bakry_emery_lambda(spec, g.x_left, g.right());
    rng::Stream rnd(rng::substream(s.seed, 0x5EED));
    CsvWriter csv(dir / "deficits.csv", "kslab inequality deficits v1",
                  {"index", "ckp", "logsob", "talagrand", "hwi"});
    double min_ckp = 1e300, min_lsi = 1e300, min_tal = 1e300, min_hwi = 1e300;
    entropy::Density1D prev = ref;
    for (int i = 0; i < count; ++i) {
      std::vector<double> v(ref.values);
      double a1 = rnd.uniform(-0.5, 0.5), a2 = rnd.uniform(-0.5, 0.5);
      double w1 = rnd.uniform(0.5, 2.0), w2 = rnd.uniform(0.5, 2.0);
      double sh = rnd.uniform(-1.0, 1.0);
      for (int j = 0; j < g.n; ++j) {
        double x = g.center(j);
        v[j] *= std::max(1.0 + a1 * std::sin(w1 * x) + a2 * std::cos(w2 * (x - sh)), 1e-3);
      }
      auto rho = entropy::Density1D::normalized(g, std::move(v));
      double ckp = entropy::ckp_deficit(rho, ref);
      double lsi = entropy::logsob_deficit(rho, spec, lambda);
      double tal = entropy::talagrand_deficit(rho, spec, lambda);
      double hwi = entropy::hwi_deficit(rho, prev, spec, lambda);
      csv.row({static_cast<double>(i), ckp, lsi, tal, hwi});
      min_ckp = std::min(min_ckp, ckp);
      min_lsi = std::min(min_lsi, lsi);
      min_tal = std::min(min_tal, tal);
      min_hwi = std::min(min_hwi, hwi);
      prev = rho;
    }
    summary["lambda"] = lambda;
    summary["min_ckp_deficit"] = min_ckp;
    summary["min_logsob_deficit"] = min_lsi;
    summary["min_talagrand_deficit"] = min_tal;
    summary["min_hwi_deficit"] = min_hwi;
  } else if (family == "loghls") {
    fields::RadialGrid g(get_int(s, "cells"), 12.0);
    rng::Stream rnd(rng::substream(s.seed, 0x105));
    CsvWriter csv(dir / "deficits.csv", "kslab loghls deficits v1",
                  {"index", "mass", "deficit"});
    double min_ratio = 1e300;
    for (int i = 0; i < count; ++i) {
      std::vector<double> v(g.n);
      double s1 = rnd.uniform(0.4, 2.0), s2 = rnd.uniform(0.4, 3.0);
      double a = rnd.uniform(0.1, 4.0), b = rnd.uniform(0.0, 4.0);
      for (int j = 0; j < g.n; ++j) {
        double r = g.center(j);
        v[j] = a * std::exp(-r * r / (2 * s1 * s1)) +
               b * std::exp(-(r - 2) * (r - 2) / (2 * s2 * s2));
      }
      fields::RadialDensity rho(g, std::move(v));
      double mass = diag::mass(rho);
      double deficit = diag::loghls_deficit(rho);
      csv.row({static_cast<double>(i), mass, deficit});
      min_ratio = std::min(min_ratio, deficit / mass);
    }
    summary["min_deficit_over_mass"] = min_ratio;
    // Minimizer family at critical mass on a finer grid.
    fields::RadialGrid gm(4096, 100.0);
    double worst = 0.0;
    for (double lam : {0.5, 1.0, 2.0}) {
      std::vector<double> v(gm.n);
      for (int j = 0; j < gm.n; ++j) {
        double r = gm.center(j);
        double d = lam + r * r;
        v[j] = 8.0 * kPi / kPi * lam / (d * d);
      }
      fields::RadialDensity f(gm, std::move(v));
      worst = std::max(worst, std::abs(diag::loghls_deficit(f)) / diag::mass(f));
    }
    summary["minimizer_max_abs_deficit_over_mass"] = worst;
  } else {
    throw ConfigError("scenario '" + s.name + "': unknown family '" + family + "'");
  }
  write_json(dir / "summary.json", summary);
}

}  // namespace

// ----------------------------------------------------------------- parse --

Batch parse_config_text(const std::string& text) {
  Batch batch;
  Scenario current;
  bool in_scenario = false;
  std::vector<std::pair<std::string, int>> pending_keys;  // key, line

  auto finish = [&]() {
    if (!in_scenario) return;
    if (current.module.empty())
      throw ConfigError("scenario '" + current.name + "' has no module key");
    auto it = module_schemas().find(current.module);
    if (it == module_schemas().end())
      throw ConfigError("scenario '" + current.name + "': unknown module '" +
                        current.module + "'");
    for (const auto& [key, line] : pending_keys)
      if (!it->second.count(key))
        throw ConfigError("scenario '" + current.name + "': unknown key '" + key +
                          "' for module '" + current.module + "'",
                          line);
    for (const auto& other : batch.scenarios)
      if (other.name == current.name)
        throw ConfigError("duplicate scenario name '" + current.name + "'");
    apply_defaults(current);
    batch.scenarios.push_back(current);
    pending_keys.clear();
  };

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto strip = [](std::string v) {
      auto b = v.find_first_not_of(" \t\r");
      auto e = v.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("unterminated section header", line_no);
      std::string inner = strip(line.substr(1, line.size() - 2));
      const std::string prefix = "scenario";
      if (inner.compare(0, prefix.size(), prefix) != 0 ||
          (inner.size() > prefix.size() &&
           !std::isspace(static_cast<unsigned char>(inner[prefix.size()]))))
        throw ConfigError("expected [scenario NAME]", line_no);
      std::string name = strip(inner.substr(prefix.size()));
      if (name.empty()) throw ConfigError("scenario needs a name", line_no);
      finish();
      current = Scenario{};
      current.name = name;
      in_scenario = true;
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value", line_no);
    if (!in_scenario)
      throw ConfigError("assignment outside a [scenario] section", line_no);
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("expected key = value", line_no);
    if (key == "module") {
      current.module = value;
    } else if (key == "seed") {
      try {
        current.seed = std::stoull(value);
      } catch (const std::exception&) {
        throw ConfigError("seed must be an unsigned integer", line_no);
      }
    } else if (key == "preset") {
      if (!current.module.empty() || !current.params.empty())
        throw ConfigError("preset must be the first assignment in a scenario",
                          line_no);
      Batch base = preset(value);  // throws on unknown preset
      if (base.scenarios.size() != 1)
        throw ConfigError("preset '" + value + "' is a multi-scenario batch and "
                          "cannot seed a single scenario",
                          line_no);
      std::string keep_name = current.name;
      current = base.scenarios.front();
      current.name = keep_name;
    } else {
      current.params[key] = value;  // later assignments win
      pending_keys.emplace_back(key, line_no);
    }
  }
  finish();
  if (batch.scenarios.empty()) throw ConfigError("no scenarios defined");
  return batch;
}

Batch parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// --------------------------------------------------------------- presets --

namespace {
Scenario make_scenario(const std::string& name, const std::string& module,
                       std::map<std::string, std::string> params) {
  Scenario s;
  s.name = name;
  s.module = module;
  s.params = std::move(params);
  apply_defaults(s);
  return s;
}
}  // namespace

std::vector<std::pair<std::string, std::string>> preset_catalog() {
  return {
      {"mass-conservation", "long subcritical run pinning exact mass conservation"},
      {"second-moment-law", "free-space subcritical run checking dM2/dt = 4M(1 - M/8pi)"},
      {"trichotomy", "subcritical, critical and supercritical runs side by side"},
      {"critical-bubble", "near-bubble data at critical mass; emits M2 drift and scale series"},
      {"supercritical-type2", "concentrated supercritical run with the S(t) indicator"},
      {"bubble-stationarity", "bubble and Liouville residual refinement ladders"},
      {"laguerre-eigen", "eigen-residual ladder of the rescaled linear operator"},
      {"jko-estimates", "minimizing-movement run verifying the a-priori estimates"},
      {"jko-vs-fp", "quantile scheme against the dense-grid solver at t = 0.5"},
      {"fp-decay", "relative-entropy decay rate against the convexity constant"},
      {"inequality-sweeps", "CKP / log-Sobolev / Talagrand / HWI deficits, randomized"},
      {"loghls", "log-HLS deficit at the minimizer family and random densities"},
      {"particles-control", "chi = 0 Brownian control with the msd slope check"},
      {"burgers-shock", "shock time, blow-up rate and similarity profiles"},
  };
}

Batch preset(const std::string& name) {
  Batch b;
  if (name == "mass-conservation") {
    b.scenarios.push_back(make_scenario(
        "mass-conservation", "ks_radial",
        {{"mass_factor", "0.5"}, {"radius", "20.0"}, {"cells", "1024"},
         {"t_end", "0.6"}, {"dt_initial", "6e-5"}, {"record_every", "500"},
         {"scheme", "semi-implicit"}}));
  } else if (name == "second-moment-law") {
    b.scenarios.push_back(make_scenario(
        "second-moment-law", "ks_radial",
        {{"mass_factor", "0.5"}, {"sigma", "1.0"}, {"radius", "40.0"},
         {"cells", "2048"}, {"t_end", "0.4"}, {"dt_initial", "2e-4"},
         {"record_every", "100"}}));
  } else if (name == "trichotomy") {
    b.scenarios.push_back(make_scenario(
        "subcritical", "ks_radial",
        {{"mass_factor", "0.5"}, {"radius", "40.0"}, {"cells", "2048"},
         {"t_end", "1.0"}, {"dt_initial", "5e-4"}, {"record_every", "100"}}));
    b.scenarios.push_back(make_scenario(
        "critical", "ks_radial",
        {{"mass_factor", "1.0"}, {"radius", "40.0"}, {"cells", "2048"},
         {"t_end", "1.0"}, {"dt_initial", "5e-4"}, {"record_every", "100"}}));
    b.scenarios.push_back(make_scenario(
        "supercritical", "ks_radial",
        {{"mass_factor", "1.25"}, {"sigma", "0.1"}, {"radius", "2.0"},
         {"cells", "8192"}, {"t_end", "1.0"}, {"dt_initial", "1e-5"},
         {"record_every", "20"}, {"blowup_sup_threshold", "4e5"}}));
  } else if (name == "critical-bubble") {
    b.scenarios.push_back(make_scenario(
        "critical-bubble", "ks_radial",
        {{"mass_factor", "1.0"}, {"sigma", "1.0"}, {"initial", "bubble-normalized"},
         {"radius", "40.0"}, {"cells", "2048"}, {"t_end", "1.0"},
         {"dt_initial", "5e-4"}, {"record_every", "100"}}));
  } else if (name == "supercritical-type2") {
    b.scenarios.push_back(make_scenario(
        "supercritical-type2", "ks_radial",
        {{"mass_factor", "1.25"}, {"sigma", "0.1"}, {"radius", "2.0"},
         {"cells", "8192"}, {"t_end", "1.0"}, {"dt_initial", "1e-5"},
         {"record_every", "20"}, {"blowup_sup_threshold", "4e5"}}));
  } else if (name == "bubble-stationarity") {
    b.scenarios.push_back(make_scenario("bubble-stationarity", "stationary", {}));
  } else if (name == "laguerre-eigen") {
    b.scenarios.push_back(make_scenario("laguerre-eigen", "stationary", {}));
  } else if (name == "jko-estimates") {
    b.scenarios.push_back(make_scenario(
        "jko-estimates", "jko",
        {{"tau", "1e-2"}, {"steps", "200"}, {"quantiles", "256"}}));
  } else if (name == "jko-vs-fp") {
    b.scenarios.push_back(make_scenario(
        "jko-vs-fp", "jko",
        {{"tau", "1e-3"}, {"steps", "500"}, {"quantiles", "256"},
         {"fp_compare", "true"}, {"fp_time", "0.5"}}));
  } else if (name == "fp-decay") {
    b.scenarios.push_back(make_scenario(
        "fp-decay", "fp",
        {{"sigma", "1.0"}, {"cells", "360"}, {"t_end", "4.6"},
         {"record_every", "400"}}));
    b.scenarios.push_back(make_scenario(
        "fp-decay-sigma2", "fp",
        {{"sigma", "2.0"}, {"cells", "360"}, {"x_left", "-12.0"},
         {"x_right", "13.0"}, {"t_end", "9.2"}, {"record_every", "400"}}));
  } else if (name == "inequality-sweeps") {
    b.scenarios.push_back(make_scenario(
        "inequality-sweeps", "sweeps",
        {{"family", "entropy"}, {"count", "500"}, {"cells", "2048"}}));
  } else if (name == "loghls") {
    b.scenarios.push_back(make_scenario(
        "loghls", "sweeps", {{"family", "loghls"}, {"count", "1000"}, {"cells", "512"}}));
  } else if (name == "particles-control") {
    b.scenarios.push_back(make_scenario(
        "particles-control", "particles",
        {{"count_u", "10000"}, {"mu", "0.5"}, {"dt", "1e-3"}, {"t_end", "0.4"},
         {"record_every", "50"}}));
  } else if (name == "burgers-shock") {
    b.scenarios.push_back(make_scenario("burgers-shock", "burgers", {}));
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return b;
}

// ------------------------------------------------------------------- run --

void run_scenario(const Scenario& scenario, const std::string& out_dir) {
  fs::path dir = fs::path(out_dir) / scenario.name;
  fs::create_directories(dir);
  if (scenario.module == "ks_radial")
    run_ks_scenario(scenario, dir);
  else if (scenario.module == "jko")
    run_jko_scenario(scenario, dir);
  else if (scenario.module == "fp")
    run_fp_scenario(scenario, dir);
  else if (scenario.module == "particles")
    run_particles_scenario(scenario, dir);
  else if (scenario.module == "burgers")
    run_burgers_scenario(scenario, dir);
  else if (scenario.module == "stationary")
    run_stationary_scenario(scenario, dir);
  else if (scenario.module == "sweeps")
    run_sweeps_scenario(scenario, dir);
  else
    throw ConfigError("scenario '" + scenario.name + "': unknown module '" +
                      scenario.module + "'");
}

std::vector<std::string> run_batch(const Batch& batch, const std::string& out_dir) {
  std::vector<std::string> errors;
  for (const auto& s : batch.scenarios) {
    try {
      run_scenario(s, out_dir);
    } catch (const std::exception& e) {
      errors.push_back("scenario '" + s.name + "': " + e.what());
    }
  }
  return errors;
}

// --------------------------------------------------------------- compare --

namespace {
bool parse_number(const std::string& text, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(text, &used);
    return used == text.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool numbers_match(double a, double b, double rel_tol, double abs_tol) {
  if (std::isnan(a) && std::isnan(b)) return true;
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= abs_tol + rel_tol * std::abs(b);
}

void compare_csv(const fs::path& got, const fs::path& want, double rel_tol,
                 double abs_tol, std::vector<std::string>& mismatches) {
  std::ifstream fa(got), fb(want);
  std::string la, lb;
  int row = 0;
  while (true) {
    bool ea = !std::getline(fa, la);
    bool eb = !std::getline(fb, lb);
    ++row;
    if (ea != eb) {
      mismatches.push_back(got.string() + ": row count differs");
      return;
    }
    if (ea) return;
    if (la == lb) continue;
    std::stringstream sa(la), sb(lb);
    std::string ca, cb;
    int col = 0;
    bool row_reported = false;
    while (true) {
      bool da = !std::getline(sa, ca, ',');
      bool db = !std::getline(sb, cb, ',');
      ++col;
      if (da != db) {
        mismatches.push_back(got.string() + ":" + std::to_string(row) +
                             ": column count differs");
        row_reported = true;
        break;
      }
      if (da) break;
      if (ca == cb) continue;
      double va, vb;
      if (parse_number(ca, va) && parse_number(cb, vb) &&
          numbers_match(va, vb, rel_tol, abs_tol))
        continue;
      mismatches.push_back(got.string() + ":" + std::to_string(row) + ":" +
                           std::to_string(col) + ": '" + ca + "' vs '" + cb + "'");
      row_reported = true;
      break;
    }
    if (row_reported && mismatches.size() > 50) return;  // enough detail
  }
}

void compare_json_values(const json& a, const json& b, const std::string& path,
                         double rel_tol, double abs_tol,
                         std::vector<std::string>& mismatches) {
  if (a.is_number() && b.is_number()) {
    if (!numbers_match(a.get<double>(), b.get<double>(), rel_tol, abs_tol))
      mismatches.push_back(path + ": " + a.dump() + " vs " + b.dump());
    return;
  }
  if (a.type() != b.type()) {
    mismatches.push_back(path + ": type mismatch");
    return;
  }
  if (a.is_object()) {
    for (auto it = b.begin(); it != b.end(); ++it) {
      if (!a.contains(it.key())) {
        mismatches.push_back(path + "." + it.key() + ": missing");
        continue;
      }
      compare_json_values(a.at(it.key()), it.value(), path + "." + it.key(),
                          rel_tol, abs_tol, mismatches);
    }
    for (auto it = a.begin(); it != a.end(); ++it)
      if (!b.contains(it.key()))
        mismatches.push_back(path + "." + it.key() + ": unexpected");
    return;
  }
  if (a.is_array()) {
    if (a.size() != b.size()) {
      mismatches.push_back(path + ": array size differs");
      return;
    }
    for (std::size_t i = 0; i < a.size(); ++i)
      compare_json_values(a[i], b[i], path + "[" + std::to_string(i) + "]",
                          rel_tol, abs_tol, mismatches);
    return;
  }
  if (a != b) mismatches.push_back(path + ": " + a.dump() + " vs " + b.dump());
}
}  // namespace

CompareReport compare_dirs(const std::string& artifact_dir,
                           const std::string& golden_dir, double rel_tol,
                           double abs_tol) {
  CompareReport report;
  fs::path golden(golden_dir), artifacts(artifact_dir);
  if (!fs::exists(golden)) {
    report.mismatches.push_back("golden directory missing: " + golden_dir);
    return report;
  }
  if (!fs::exists(artifacts)) {
    report.mismatches.push_back("artifact directory missing: " + artifact_dir);
    return report;
  }
  for (const auto& entry : fs::recursive_directory_iterator(golden)) {
    if (!entry.is_regular_file()) continue;
    fs::path rel = fs::relative(entry.path(), golden);
    fs::path counterpart = artifacts / rel;
    if (!fs::exists(counterpart)) {
      report.mismatches.push_back(rel.string() + ": missing from artifacts");
      continue;
    }
    if (entry.path().extension() == ".json") {
      try {
        json a = json::parse(std::ifstream(counterpart));
        json b = json::parse(std::ifstream(entry.path()));
        compare_json_values(a, b, rel.string(), rel_tol, abs_tol,
                            report.mismatches);
      } catch (const std::exception& e) {
        report.mismatches.push_back(rel.string() + ": json parse error: " + e.what());
      }
    } else {
      compare_csv(counterpart, entry.path(), rel_tol, abs_tol, report.mismatches);
    }
  }
  report.pass = report.mismatches.empty();
  return report;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace kslab::harness
