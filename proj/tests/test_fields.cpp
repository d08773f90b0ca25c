#include <cmath>
#include <vector>

#include "doctest.h"
#include "kslab/fields.hpp"
#include "kslab/rng.hpp"
#include "kslab/stationary.hpp"

using namespace kslab;

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;

fields::RadialDensity random_density(fields::RadialGrid grid, std::uint64_t seed) {
  rng::Stream s(seed);
  std::vector<double> v(grid.n);
  for (double& x : v) x = s.uniform(0.0, 3.0);
  return fields::RadialDensity(grid, std::move(v));
}
}  // namespace

TEST_SUITE("fields") {

TEST_CASE("radial grid invariants") {
  fields::RadialGrid g(128, 4.0);
  CHECK(g.h() == doctest::Approx(4.0 / 128).epsilon(1e-15));
  for (int i = 0; i + 1 < g.n; ++i) CHECK(g.center(i) < g.center(i + 1));
  CHECK(g.center(0) > 0.0);
  CHECK(g.center(g.n - 1) < g.R);
  CHECK_THROWS(fields::RadialGrid(0, 1.0));
  CHECK_THROWS(fields::RadialGrid(8, -1.0));
}

TEST_CASE("cumulative of zero density is zero") {
  fields::RadialGrid g(64, 2.0);
  fields::RadialDensity rho(g, std::vector<double>(64, 0.0));
  auto m = fields::cumulative_from_density(rho);
  for (double v : m.values) CHECK(v == 0.0);
}

TEST_CASE("cumulative of the unit bubble matches the closed form") {
  // Oracle: integrating 2 pi s U0(s) gives 8 pi r^2 / (1 + r^2); m(1) = 4 pi.
  fields::RadialGrid g(4000, 40.0);
  auto rho = stationary::bubble_on_grid({1.0}, g);
  auto m = fields::cumulative_from_density(rho);
  int at_one = static_cast<int>(1.0 / g.h());
  double h2 = g.h() * g.h();
  CHECK(m.values[at_one] == doctest::Approx(4.0 * kPi).epsilon(50 * h2));
  int at_ten = static_cast<int>(10.0 / g.h());
  CHECK(m.values[at_ten] ==
        doctest::Approx(8.0 * kPi * 100.0 / 101.0).epsilon(50 * h2));
}

TEST_CASE("constant density integrates exactly under the midpoint rule") {
  fields::RadialGrid g(37, 3.0);
  const double c = 1.7;
  fields::RadialDensity rho(g, std::vector<double>(37, c));
  auto m = fields::cumulative_from_density(rho);
  for (int i = 0; i <= g.n; ++i) {
    double r = g.edge(i);
    CHECK(m.values[i] == doctest::Approx(kPi * c * r * r).epsilon(1e-13));
  }
}

TEST_CASE("density_from_cumulative inverts the quadrature") {
  fields::RadialGrid g(200, 5.0);
  SUBCASE("m = pi r^2 gives unit density") {
    std::vector<double> m(g.n + 1);
    for (int i = 0; i <= g.n; ++i) m[i] = kPi * g.edge(i) * g.edge(i);
    auto rho = fields::density_from_cumulative(fields::CumulativeMass(g, m));
    for (double v : rho.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("zero mass gives zero density") {
    auto rho = fields::density_from_cumulative(
        fields::CumulativeMass(g, std::vector<double>(g.n + 1, 0.0)));
    for (double v : rho.values) CHECK(v == 0.0);
  }
  SUBCASE("round trip is the identity on random densities") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto rho = random_density(g, seed);
      auto back = fields::density_from_cumulative(fields::cumulative_from_density(rho));
      for (int i = 0; i < g.n; ++i)
        CHECK(back.values[i] == doctest::Approx(rho.values[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("strict policy rejects decreasing mass, clamp reports it") {
  fields::RadialGrid g(4, 1.0);
  std::vector<double> m{0.0, 1.0, 0.5, 1.5, 2.0};
  CHECK_THROWS(fields::density_from_cumulative(fields::CumulativeMass(g, m)));
  double clamped = 0.0;
  auto rho = fields::density_from_cumulative(fields::CumulativeMass(g, m),
                                             fields::NegativePolicy::clamp, &clamped);
  CHECK(clamped == doctest::Approx(0.5));
  for (double v : rho.values) CHECK(v >= 0.0);
}

TEST_CASE("cumulative output is nondecreasing for nonnegative densities") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto rho = random_density(fields::RadialGrid(97, 2.5), 100 + seed);
    auto m = fields::cumulative_from_density(rho);
    for (int i = 0; i < m.grid.n; ++i) CHECK(m.values[i + 1] >= m.values[i]);
    CHECK(fields::total_mass(rho) == m.total());  // bit-identical quadrature
  }
}

TEST_CASE("quantiles of uniform densities are linear in the level") {
  SUBCASE("uniform on [0, 1]") {
    std::vector<double> v(50, 1.0);
    auto q = fields::quantile_from_samples(v, 0.0, 1.0 / 50, 32);
    for (int k = 0; k < q.K(); ++k)
      CHECK(q.q[k] == doctest::Approx(q.level(k)).epsilon(1e-13));
  }
  SUBCASE("uniform on [0, 2] scales the quantiles") {
    std::vector<double> v(50, 1.0);
    auto q = fields::quantile_from_samples(v, 0.0, 2.0 / 50, 32);
    for (int k = 0; k < q.K(); ++k)
      CHECK(q.q[k] == doctest::Approx(2.0 * q.level(k)).epsilon(1e-13));
  }
}

TEST_CASE("gaussian median sits at zero within grid tolerance") {
  const int n = 2001;
  const double dx = 16.0 / n;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    double x = -8.0 + (i + 0.5) * dx;
    v[i] = std::exp(-0.5 * x * x);
  }
  auto q = fields::quantile_from_samples(v, -8.0, dx, 255);
  CHECK(std::abs(q.q[127]) < dx);
}

TEST_CASE("quantile output is always nondecreasing") {
  rng::Stream s(7);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> v(64);
    for (double& x : v) x = s.uniform() < 0.3 ? 0.0 : s.uniform();
    v[static_cast<std::size_t>(s.uniform(0, 63.999))] += 1.0;  // guarantee mass
    auto q = fields::quantile_from_samples(v, -1.0, 0.05, 61);
    for (int k = 0; k + 1 < q.K(); ++k) CHECK(q.q[k] <= q.q[k + 1]);
  }
}

TEST_CASE("zero total mass is rejected") {
  std::vector<double> v(10, 0.0);
  CHECK_THROWS(fields::quantile_from_samples(v, 0.0, 0.1, 8));
}

}  // TEST_SUITE
