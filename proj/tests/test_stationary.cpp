#include <cmath>
#include <vector>

#include "doctest.h"
#include "kslab/fields.hpp"
#include "kslab/stationary.hpp"

using namespace kslab;

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;

double order(double coarse, double fine) { return std::log2(coarse / fine); }
}  // namespace

TEST_SUITE("stationary") {

TEST_CASE("bubble density pointwise values") {
  CHECK(stationary::bubble_density({1.0}, 0.0) == doctest::Approx(8.0));
  CHECK(stationary::bubble_density({1.0}, 1.0) == doctest::Approx(2.0));
  // Scaling: lambda^-2 U0(r / lambda).
  CHECK(stationary::bubble_density({0.5}, 0.0) == doctest::Approx(32.0));
}

TEST_CASE("bubble mass is 8 pi for any scale") {
  for (double lambda : {0.3, 1.0, 2.5}) {
    fields::RadialGrid g(20000, 120.0 * lambda);
    auto rho = stationary::bubble_on_grid({lambda}, g);
    CHECK(fields::total_mass(rho) ==
          doctest::Approx(8.0 * kPi).epsilon(5e-3));
    // Closed-form cumulative is exact.
    CHECK(stationary::bubble_cumulative({lambda}, 1e9) ==
          doctest::Approx(8.0 * kPi).epsilon(1e-9));
  }
}

TEST_CASE("bubble cumulative closed form") {
  CHECK(stationary::bubble_cumulative({2.0}, 2.0) == doctest::Approx(4.0 * kPi));
  CHECK(stationary::bubble_cumulative({1.0}, 0.0) == 0.0);
  // against the quadrature of the density
  fields::RadialGrid g(8000, 20.0);
  auto m = fields::cumulative_from_density(stationary::bubble_on_grid({1.0}, g));
  double h2 = g.h() * g.h();
  for (int i : {100, 1000, 4000, 8000}) {
    CHECK(m.values[i] ==
          doctest::Approx(stationary::bubble_cumulative({1.0}, g.edge(i)))
              .epsilon(100 * h2));
  }
}

TEST_CASE("liouville residual converges at second order") {
  double r1 = stationary::liouville_residual(0.1);
  double r2 = stationary::liouville_residual(0.05);
  double r3 = stationary::liouville_residual(0.025);
  CHECK(r1 > r2);
  CHECK(r2 > r3);
  CHECK(order(r1, r2) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(order(r2, r3) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("phi_a solves the stationary mass equation") {
  double r1 = stationary::phi_a_residual(1.0, 0.1);
  double r2 = stationary::phi_a_residual(1.0, 0.05);
  double r3 = stationary::phi_a_residual(1.0, 0.025);
  CHECK(order(r1, r2) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(order(r2, r3) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("phi_a family is a rescaling: phi_2(xi) = phi_1(xi / 2)") {
  for (double xi : {0.25, 0.5, 1.0, 3.0}) {
    double a2 = 8.0 * kPi * xi * xi / (xi * xi + 4.0);
    double a1_scaled = 8.0 * kPi * (xi / 2) * (xi / 2) / ((xi / 2) * (xi / 2) + 1.0);
    CHECK(a2 == doctest::Approx(a1_scaled).epsilon(1e-14));
  }
}

TEST_CASE("constant profile has zero phi-equation residual") {
  // phi = 8 pi: both terms vanish because phi_xi = 0.
  auto phi = [](double) { return 8.0 * kPi; };
  double h = 0.05;
  for (int i = 1; i < 40; ++i) {
    double xi = i * h;
    double second = (phi(xi + h) - 2 * phi(xi) + phi(xi - h)) / (h * h);
    double first = (phi(xi + h) - phi(xi - h)) / (2 * h);
    CHECK(xi * second + (phi(xi) / (2 * kPi) - 1.0) * first == 0.0);
  }
}

TEST_CASE("laguerre polynomials by recurrence") {
  // L_2(x) = 1 - 2x + x^2/2, L_3(x) = 1 - 3x + 3x^2/2 - x^3/6.
  for (double x : {0.0, 0.5, 1.0, 3.0, 9.0}) {
    CHECK(stationary::laguerre_polynomial(0, x) == 1.0);
    CHECK(stationary::laguerre_polynomial(1, x) == doctest::Approx(1.0 - x));
    CHECK(stationary::laguerre_polynomial(2, x) ==
          doctest::Approx(1.0 - 2.0 * x + 0.5 * x * x).epsilon(1e-13));
    CHECK(stationary::laguerre_polynomial(3, x) ==
          doctest::Approx(1.0 - 3.0 * x + 1.5 * x * x - x * x * x / 6.0)
              .epsilon(1e-13));
  }
}

TEST_CASE("laguerre eigenfunctions of the rescaled operator") {
  SUBCASE("eigen-residuals shrink at order >= 1.8") {
    for (int k : {0, 1, 2}) {
      auto c1 = stationary::laguerre_eigen_check(k, 0.04);
      auto c2 = stationary::laguerre_eigen_check(k, 0.02);
      auto c3 = stationary::laguerre_eigen_check(k, 0.01);
      if (c1.eigen_residual < 1e-12) {
        // constants are exact for the discrete operator (k = 0)
        CHECK(c3.eigen_residual < 1e-12);
        continue;
      }
      CHECK(order(c1.eigen_residual, c2.eigen_residual) >= 1.8);
      CHECK(order(c2.eigen_residual, c3.eigen_residual) >= 1.8);
    }
  }
  SUBCASE("k = 0 is flat with eigenvalue one") {
    auto c = stationary::laguerre_eigen_check(0, 0.01);
    CHECK(c.eigen_residual < 1e-10);  // A phi0 = phi0 holds exactly for constants
  }
  SUBCASE("printed normalization against the Gaussian quadrature") {
    for (int k : {0, 1, 2, 3}) {
      auto c = stationary::laguerre_eigen_check(k, 0.01);
      CHECK(c.norm_quadrature ==
            doctest::Approx(c.norm_closed_form).epsilon(1e-6));
    }
    auto c0 = stationary::laguerre_eigen_check(0, 0.01);
    CHECK(c0.norm_closed_form == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-14));
  }
  SUBCASE("k outside the supported range") {
    CHECK_THROWS(stationary::laguerre_eigen_check(4, 0.02));
    CHECK_THROWS(stationary::laguerre_eigen_check(-1, 0.02));
  }
}

TEST_CASE("fit_bubble") {
  SUBCASE("recovers an exact profile") {
    fields::RadialGrid g(2500, 2.5);
    auto rho = stationary::bubble_on_grid({0.5}, g);
    auto fit = stationary::fit_bubble(rho);
    CHECK(fit.lambda_hat == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(fit.residual <= 1e-10);
  }
  SUBCASE("wrong-mass profile keeps the formula anchor but reports misfit") {
    fields::RadialGrid g(2500, 2.5);
    auto rho = stationary::bubble_on_grid({1.0}, g);
    for (double& v : rho.values) v *= 2.0;  // 2 U0: rho(0) = 16
    auto fit = stationary::fit_bubble(rho);
    CHECK(fit.lambda_hat == doctest::Approx(std::sqrt(8.0 / 16.0)).epsilon(1e-6));
    CHECK(fit.residual > 0.1);
  }
  SUBCASE("gaussian data exceeds the bubble-fit threshold") {
    fields::RadialGrid g(2000, 8.0);
    std::vector<double> v(g.n);
    for (int i = 0; i < g.n; ++i) {
      double r = g.center(i);
      v[i] = 4.0 * std::exp(-r * r);
    }
    auto fit = stationary::fit_bubble(fields::RadialDensity(g, v));
    CHECK(fit.residual > 0.1);
  }
  SUBCASE("zero central density is rejected") {
    fields::RadialGrid g(16, 1.0);
    CHECK_THROWS(stationary::fit_bubble(
        fields::RadialDensity(g, std::vector<double>(16, 0.0))));
  }
}

}  // TEST_SUITE
