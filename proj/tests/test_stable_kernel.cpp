#include <doctest.h>

#include <cmath>

#include "sdelab/quadrature.hpp"
#include "sdelab/stable_kernel.hpp"

using namespace sdelab;

namespace {
constexpr double kPi = 3.14159265358979323846;

double cauchy1(double t, double z) { return t / (kPi * (t * t + z * z)); }
double gauss1(double t, double z) { return std::exp(-z * z / (4 * t)) / std::sqrt(4 * kPi * t); }

KernelQuery q1(double t, double z) { return KernelQuery{t, {z}}; }
KernelQuery q2(double t, double x, double y) { return KernelQuery{t, {x, y}}; }
}  // namespace

TEST_CASE("gauss-legendre panel integrates degree-31 polynomials exactly") {
  // int_0^1 x^k dx = 1/(k+1); 16-point rule is exact through degree 31
  for (int k : {0, 3, 10, 31}) {
    const double got = gl16_panel([&](double x) { return std::pow(x, k); }, 0.0, 1.0);
    CHECK(got == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
  }
  const double v = integrate_panels([](double x) { return std::exp(-x * x); }, 0.0, 6.0, 0.5,
                                    1e-13, 12);
  CHECK(v == doctest::Approx(std::sqrt(kPi) / 2.0).epsilon(1e-12));
}

TEST_CASE("cauchy density to 1e-8") {
  for (double t : {0.1, 1.0, 10.0})
    for (double z = -20.0; z <= 20.0; z += 1.3)
      CHECK(std::abs(density({1.0, 1}, q1(t, z)) - cauchy1(t, z)) < 1e-8);
}

TEST_CASE("gaussian density (variance 2t) to 1e-8") {
  for (double t : {0.1, 1.0, 10.0})
    for (double z = -20.0; z <= 20.0; z += 1.7)
      CHECK(std::abs(density({2.0, 1}, q1(t, z)) - gauss1(t, z)) < 1e-8);
}

TEST_CASE("frozen alpha=1.5 values") {
  // independently computed by high-precision quadrature of
  // (1/pi) int_0^inf exp(-u^1.5) cos(u z) du
  CHECK(std::abs(density({1.5, 1}, q1(1.0, 2.0)) - 0.08453962312613754) < 1e-9);
  CHECK(std::abs(density({1.5, 1}, q1(1.0, 0.0)) - 0.28735275145216455) < 1e-9);
}

TEST_CASE("d=2 closed forms") {
  // alpha=1: P(t, x) = Gamma(3/2)/pi^{3/2} * t (t^2+|x|^2)^{-3/2}
  const double c = std::tgamma(1.5) / std::pow(kPi, 1.5);
  for (double t : {0.5, 2.0}) {
    for (double r : {0.0, 0.7, 3.0, 9.0}) {
      const double poisson = c * t / std::pow(t * t + r * r, 1.5);
      CHECK(std::abs(density({1.0, 2}, q2(t, r, 0.0)) - poisson) < 1e-8);
      const double g2 = std::exp(-r * r / (4 * t)) / (4 * kPi * t);
      CHECK(std::abs(density({2.0, 2}, q2(t, 0.0, r)) - g2) < 1e-8);
    }
  }
}

TEST_CASE("symmetry, positivity, self-similarity") {
  StableParams ps{1.7, 1};
  for (double z : {0.3, 1.1, 4.0, 15.0}) {
    const double plus = density(ps, q1(0.7, z));
    CHECK(plus == doctest::Approx(density(ps, q1(0.7, -z))).epsilon(1e-12));
    CHECK(plus > 0.0);
  }
  // p(t, w) = t^{-1/a} p(1, w t^{-1/a})
  for (double t : {0.25, 3.0}) {
    const double s = std::pow(t, -1.0 / 1.7);
    for (double z : {0.0, 0.9, 6.0})
      CHECK(density(ps, q1(t, z)) ==
            doctest::Approx(s * density(ps, q1(1.0, z * s))).epsilon(1e-9));
  }
}

TEST_CASE("gradient matches a finite difference of the density") {
  StableParams ps{1.4, 1};
  for (double z : {0.4, 1.5, 7.0}) {
    const double dz = 1e-5;
    const double fd =
        (density(ps, q1(1.2, z + dz)) - density(ps, q1(1.2, z - dz))) / (2 * dz);
    const auto g = grad_density(ps, q1(1.2, z));
    CHECK(g.size() == 1);
    CHECK(g[0] == doctest::Approx(fd).epsilon(1e-5));
  }
  // d=2: gradient points against the position (radially decreasing)
  const auto g2 = grad_density({1.5, 2}, q2(1.0, 0.8, -0.6));
  CHECK(g2.size() == 2);
  CHECK(g2[0] < 0.0);
  CHECK(g2[1] > 0.0);
}

TEST_CASE("cdf: symmetry point, monotonicity, closed forms") {
  StableParams ps{1.5, 1};
  CHECK(cdf(ps, 1.0, 0.0) == doctest::Approx(0.5).epsilon(1e-10));
  double prev = 0.0;
  for (double x = -30.0; x <= 30.0; x += 2.5) {
    const double F = cdf(ps, 2.0, x);
    CHECK(F >= prev - 1e-12);
    prev = F;
  }
  CHECK(cdf(ps, 1.0, 40.0) > 0.98);
  CHECK(cdf(ps, 1.0, -40.0) < 0.02);
  // Cauchy: F(x) = 1/2 + atan(x/t)/pi
  for (double x : {-3.0, 0.5, 8.0})
    CHECK(cdf({1.0, 1}, 0.8, x) ==
          doctest::Approx(0.5 + std::atan(x / 0.8) / kPi).epsilon(1e-9));
}

TEST_CASE("semigroup property within quadrature accuracy") {
  std::vector<double> grid;
  for (double y = -6.0; y <= 6.0; y += 0.75) grid.push_back(y);
  CHECK(semigroup_residual({1.5, 1}, 0.4, 0.6, grid) < 1e-4);
  CHECK(semigroup_residual({1.8, 1}, 1.0, 1.0, grid) < 1e-4);
}

TEST_CASE("proxy kernel brackets the density uniformly") {
  StableParams ps{1.5, 1};
  std::vector<KernelQuery> grid;
  for (double t : {0.1, 1.0, 10.0})
    for (double z = 0.0; z <= 20.0; z += 0.5) grid.push_back(q1(t, z));
  const auto ext = aronson_ratio(ps, grid);
  CHECK(std::isfinite(ext.min_ratio));
  CHECK(std::isfinite(ext.max_ratio));
  CHECK(ext.min_ratio > 0.0);
  CHECK(ext.max_ratio < 10.0);
  CHECK(ext.min_ratio < ext.max_ratio);
}

TEST_CASE("tabulated kernel agrees with direct quadrature") {
  auto tab = StableKernelTable::get(1.5);
  StableParams ps{1.5, 1};
  for (double u : {0.0, 0.05, 0.8, 3.0, 20.0, 63.9, 64.1, 90.0, 300.0}) {
    CHECK(tab->p1(u) == doctest::Approx(density(ps, q1(1.0, u))).epsilon(2e-7));
    CHECK(tab->cdf1(u) == doctest::Approx(cdf(ps, 1.0, u)).epsilon(2e-7));
  }
  // scale covariance is exact by construction
  for (double t : {0.2, 5.0}) {
    const double s = std::pow(t, -2.0 / 3.0);
    CHECK(tab->p(t, 1.3) == s * tab->p1(1.3 * s));
    CHECK(tab->dp(t, -0.7) == s * s * tab->dp1(-0.7 * s));
  }
  // gradient table: odd, negative on the right half-axis
  CHECK(tab->dp1(1.0) < 0.0);
  CHECK(tab->dp1(-1.0) == doctest::Approx(-tab->dp1(1.0)).epsilon(1e-12));
  // the cache hands out one table per alpha
  CHECK(StableKernelTable::get(1.5).get() == tab.get());
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(density({0.0, 1}, q1(1.0, 0.0)), std::domain_error);
  CHECK_THROWS_AS(density({2.5, 1}, q1(1.0, 0.0)), std::domain_error);
  CHECK_THROWS_AS(density({1.5, 3}, q1(1.0, 0.0)), std::exception);
  CHECK_THROWS_AS(density({1.5, 1}, KernelQuery{0.0, {0.0}}), std::exception);
}
