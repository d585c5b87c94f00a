#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gcfluct/analytic.hpp"
#include "test_util.hpp"

using namespace gcfluct;

namespace {

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> g;
  for (int i = 0; i < points; ++i) {
    double f = static_cast<double>(i) / (points - 1);
    g.push_back(lo * std::pow(hi / lo, f));
  }
  return g;
}

}  // namespace

TEST_CASE("rho: trivial and frozen values") {
  CHECK(analytic::rho(1.0) == 0.0);
  CHECK(analytic::rho(0.0) == 0.0);
  CHECK(analytic::rho(0.5) == 0.0);

  // frozen from an independent bisection of 1 - x = exp(-t x)
  CHECK(analytic::rho(2.0) == doctest::Approx(0.79681213002002005).epsilon(1e-13));
  CHECK(analytic::rho(3.0) == doctest::Approx(0.94047979070735963).epsilon(1e-13));
  CHECK(analytic::rho(1.05) == doctest::Approx(0.09370183707290155).epsilon(1e-12));

  for (double t : {1.2, 2.0, 3.0, 7.5}) {
    CHECK(analytic::rho(t) == doctest::Approx(testutil::rho_bisect(t)).epsilon(1e-11));
  }
}

TEST_CASE("rho: residual within root tolerance") {
  for (double t : log_grid(1.05, 10.0, 57)) {
    double r = analytic::rho(t);
    CHECK(std::abs(1.0 - r - std::exp(-t * r)) <= 1e-13);
  }
}

TEST_CASE("rho: domain errors") {
  CHECK_THROWS_AS(analytic::rho(-0.1), std::domain_error);
  CHECK_THROWS_AS(analytic::rho(std::nan("")), std::domain_error);
  CHECK_THROWS_AS(analytic::rho(HUGE_VAL), std::domain_error);
}

TEST_CASE("scaling: frozen bundle at t = 2") {
  auto b = analytic::scaling(2.0);
  CHECK(b.rho == doctest::Approx(0.79681213002002005).epsilon(1e-13));
  CHECK(b.lambda == doctest::Approx(0.40637573995995991).epsilon(1e-13));
  CHECK(b.u == doctest::Approx(2.9215536345675051).epsilon(1e-13));
  CHECK(b.v == doctest::Approx(3.9215536345675051).epsilon(1e-13));
  CHECK(b.sigma2 == doctest::Approx(0.45944172300703756).epsilon(1e-12));
  CHECK(b.rho_prime == doctest::Approx(0.27273575285157374).epsilon(1e-12));
  // sigma2 equals rho(1-rho)/(1-lambda)^2 by construction and v/u^2 by identity
  CHECK(b.sigma2 == doctest::Approx(b.v / (b.u * b.u)).epsilon(1e-13));
}

TEST_CASE("scaling: domain error at and below criticality") {
  CHECK_THROWS_AS(analytic::scaling(1.0), std::domain_error);
  CHECK_THROWS_AS(analytic::scaling(0.7), std::domain_error);
}

TEST_CASE("scaling: v vanishes at criticality from above") {
  CHECK(analytic::scaling(1.0 + 1e-8).v < 1e-7);
  CHECK(analytic::scaling(1.0 + 1e-8).v > 0.0);
}

TEST_CASE("scaling bundle invariants on the acceptance grid") {
  const auto grid = log_grid(1.05, 10.0, 200);
  double v_prev = 0.0;
  for (double t : grid) {
    auto b = analytic::scaling(t);
    CHECK(std::abs(1.0 - b.rho - std::exp(-t * b.rho)) <= 1e-12);
    CHECK(std::abs(b.rho_complement - std::exp(-t * (1.0 - b.rho_complement))) <= 1e-12);
    CHECK(b.rho + b.rho_complement == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.lambda > 0.0);
    CHECK(b.lambda < 1.0);
    CHECK(std::abs(b.lambda * std::exp(-b.lambda) - t * std::exp(-t)) <= 1e-12);
    CHECK(b.u > 0.0);
    CHECK(std::abs(b.u - (1.0 - b.lambda) / b.rho_complement) <= 1e-12 * std::max(1.0, b.u));
    CHECK(b.v > v_prev);  // strictly increasing along the grid
    v_prev = b.v;
    CHECK(std::abs(b.sigma2 - b.v / (b.u * b.u)) <= 1e-12 * std::max(1.0, b.sigma2));
    CHECK(std::abs(b.rho_prime - b.rho * b.rho_complement / (1.0 - b.lambda)) <= 1e-12);
    if (b.rho < 0.999) {
      // away from saturation the identity also holds through the rounded rho
      CHECK(std::abs(b.u - (1.0 - b.lambda) / (1.0 - b.rho)) <= 1e-12 * std::max(1.0, b.u));
    }
  }
}

TEST_CASE("v_inverse: round trips and frozen value") {
  CHECK(analytic::v_inverse(analytic::scaling(2.0).v) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(analytic::v_inverse(analytic::scaling(1.5).v) == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(analytic::v_inverse(3.9215536345675051) == doctest::Approx(2.0).epsilon(1e-10));

  for (double t : log_grid(1.05, 10.0, 200)) {
    double v = analytic::scaling(t).v;
    CHECK(std::abs(analytic::v_inverse(v) - t) <= 1e-10 * std::max(1.0, t));
    CHECK(std::abs(analytic::scaling(analytic::v_inverse(v)).v - v) <= 1e-10 * std::max(1.0, v));
  }
}

TEST_CASE("v_inverse: domain errors") {
  CHECK_THROWS_AS(analytic::v_inverse(0.0), std::domain_error);
  CHECK_THROWS_AS(analytic::v_inverse(-1.0), std::domain_error);
}

TEST_CASE("cov_kernel: diagonal, symmetry, frozen off-diagonal") {
  auto b2 = analytic::scaling(2.0);
  CHECK(analytic::cov_kernel(2.0, 2.0) == doctest::Approx(b2.sigma2).epsilon(1e-13));
  CHECK(analytic::cov_kernel(1.5, 2.5) == doctest::Approx(analytic::cov_kernel(2.5, 1.5)));
  // frozen: v(1.5) / (u(1.5) u(2.5)) from the bisection oracle
  CHECK(analytic::cov_kernel(1.5, 2.5) == doctest::Approx(0.22853182514949025).epsilon(1e-12));
  auto b15 = analytic::scaling(1.5);
  auto b25 = analytic::scaling(2.5);
  CHECK(analytic::cov_kernel(1.5, 2.5) ==
        doctest::Approx(b15.v / (b15.u * b25.u)).epsilon(1e-13));
  CHECK_THROWS_AS(analytic::cov_kernel(1.0, 2.0), std::domain_error);
  CHECK_THROWS_AS(analytic::cov_kernel(2.0, 0.5), std::domain_error);
}

TEST_CASE("cov_kernel: positive semidefinite on a grid") {
  const auto grid = log_grid(1.2, 6.0, 12);
  std::vector<std::vector<double>> k(grid.size(), std::vector<double>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      k[i][j] = analytic::cov_kernel(grid[i], grid[j]);
    }
  }
  CHECK(testutil::smallest_eigenvalue(k) >= -1e-10);
}

TEST_CASE("sde_coefficients: structure and frozen values") {
  auto c0 = analytic::sde_coefficients(2.0, 0.0);
  CHECK(c0.drift == 0.0);  // drift is linear in x
  CHECK(c0.diffusion == doctest::Approx(0.77396048971456813).epsilon(1e-12));

  auto c1 = analytic::sde_coefficients(2.0, 1.0);
  CHECK(c1.drift == doctest::Approx(-1.9188834460140751).epsilon(1e-12));
  CHECK(c1.diffusion == c0.diffusion);  // diffusion is state-independent

  auto c2 = analytic::sde_coefficients(2.0, -3.0);
  CHECK(c2.drift == doctest::Approx(3.0 * 1.9188834460140751).epsilon(1e-12));

  CHECK_THROWS_AS(analytic::sde_coefficients(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(analytic::sde_coefficients(2.0, HUGE_VAL), std::domain_error);
}

TEST_CASE("sde_coefficients match finite-difference forms -u'/u and v'/u^2") {
  const double h = 1e-6;
  for (double t : log_grid(1.05, 10.0, 200)) {
    auto lo = analytic::scaling(t - h);
    auto hi = analytic::scaling(t + h);
    auto mid = analytic::scaling(t);
    double u_prime = (hi.u - lo.u) / (2.0 * h);
    double v_prime = (hi.v - lo.v) / (2.0 * h);

    const double x = 1.0;
    auto c = analytic::sde_coefficients(t, x);
    CHECK(std::abs(c.drift - (-u_prime / mid.u) * x) <= 1e-6 * std::max(1.0, std::abs(c.drift)));
    CHECK(std::abs(c.diffusion - v_prime / (mid.u * mid.u)) <=
          1e-6 * std::max(1.0, c.diffusion));
  }
}
