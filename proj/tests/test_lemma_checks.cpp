#include <doctest.h>

#include <cmath>
#include <limits>

#include "sdelab/lemma_checks.hpp"

using namespace sdelab;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// Cauchy closed forms pin the ratio definitions: p(u,x) = u/(pi(u^2+x^2)),
// |p'| u / p = 2u|x|/(u^2+x^2), maximal (= 1) on the diagonal x = u.
TEST_CASE("derivative ratio against cauchy closed forms") {
  for (double u : {0.3, 1.0, 2.5}) {
    CHECK(derivative_ratio(1.0, u, u, 0, 1) == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(derivative_ratio(1.0, u, 0.0, 0, 1) == doctest::Approx(0.0).scale(1).epsilon(1e-6));
    const double x = 2.0 * u;  // 2u(2u)/(u^2+4u^2) = 4/5
    CHECK(derivative_ratio(1.0, u, x, 0, 1) == doctest::Approx(0.8).epsilon(2e-3));
    // beta = 1, zeta = 0: |d_u p| u / p = |x^2 - u^2| / (x^2 + u^2)
    CHECK(derivative_ratio(1.0, u, 2.0 * u, 1, 0) == doctest::Approx(0.6).epsilon(5e-3));
  }
  CHECK_THROWS_AS(derivative_ratio(1.0, 1.0, 1.0, 0, 0), std::invalid_argument);
}

TEST_CASE("holder ratios reach their taylor limits on the cauchy kernel") {
  const double u = 0.8;
  // space, theta = 1, x' -> x at the diagonal x = u: |p'| u / (2p) -> 1/2
  CHECK(holder_space_ratio(1.0, u, u, u * (1.0 + 1e-5), 1.0, 0) ==
        doctest::Approx(0.5).epsilon(1e-3));
  // time, theta = 1 at x = 0: |d_u p| u / (2p) -> 1/2
  CHECK(holder_time_ratio(1.0, u, u * (1.0 + 1e-6), 0.0, 1.0, 0) ==
        doctest::Approx(0.5).epsilon(1e-3));
  // far-apart points saturate the (.. ^ 1) cap: ratio <= 1 by construction
  CHECK(holder_space_ratio(1.5, 1.0, -5.0, 5.0, 0.5, 0) <= 1.0);
}

TEST_CASE("moment norms: exact L1 mass, scale-flat combination, rejection") {
  // l = inf means the L^1 norm of p |.|^0, i.e. exactly the total mass
  for (double u : {0.2, 1.0, 4.0})
    CHECK(moment_norm(1.5, u, kInf, 0.0) == doctest::Approx(1.0).epsilon(1e-5));
  // l = 2, delta = 0.5 at alpha = 1.5: exponent -1/(a l) + d/a = 0, flat in u
  const double n1 = moment_norm(1.5, 0.3, 2.0, 0.5);
  const double n2 = moment_norm(1.5, 2.0, 2.0, 0.5);
  CHECK(n1 == doctest::Approx(n2).epsilon(0.01));
  // the integral diverges once delta >= d/l + alpha
  CHECK_THROWS_AS(moment_norm(1.5, 1.0, kInf, 1.5), std::domain_error);
  CHECK_THROWS_AS(moment_norm(1.2, 1.0, 1.0, 2.3), std::domain_error);
}

TEST_CASE("convolution identities: chapman-kolmogorov fixes the constants") {
  // phi = 1, l = inf: LHS integrates to p(t-s, y-x) exactly, bracket = 2
  const auto one = [](double) { return 1.0; };
  for (double fr : {0.25, 0.5, 0.8}) {
    const double s = 0.0, t = 1.0, u = fr * t;
    CHECK(convo_space_ratio(1.5, s, u, t, -0.3, 0.6, one, 1.0, kInf) ==
          doctest::Approx(0.5).epsilon(3e-3));
  }
  // product norm stays bounded by a modest constant across placements
  for (double xi : {-2.0, 0.0, 1.5}) {
    const double r = pq_convo_ratio(1.5, 0.0, 0.35, 1.0, xi, 0.4, 2.0);
    CHECK(std::isfinite(r));
    CHECK(r > 0.0);
    CHECK(r < 3.0);
  }
}

TEST_CASE("bulk drift convolution: constant field integrates exactly") {
  // |b| = 1, beta1 = beta2 = 0, u = 0, v = t: LHS = t p(t, y-x) by
  // Chapman-Kolmogorov; gamma = alpha - 1 so the integrable RHS is also t p
  auto b = constant_drift({1.0});
  for (double t : {0.5, 1.0}) {
    const double r = convo_bulk_ratio(1.5, b, 0.0, 0.0, 0.0, t, t, -0.3, 0.7, 32);
    CHECK(r == doctest::Approx(1.0).epsilon(5e-3));
  }
}

TEST_CASE("bulk convolution rejects exponents outside both regimes") {
  auto b = builtin_singular_drift("radial", 1.0, 0.1, 0.0, 1.0, 1, 8.0, kInf);
  // beta1 large makes A1 >= 1 (singular regime), but v = t needs v < t there
  CHECK_THROWS_AS(convo_bulk_ratio(1.5, b, 1.0, 0.0, 0.1, 1.0, 1.0, 0.0, 1.0),
                  std::domain_error);
}

TEST_CASE("cutoff shift ratio is unity at zero shift") {
  CHECK(cutoff_shift_ratio(1.5, 0.7, 0.0, 1.3, 0) == doctest::Approx(1.0).epsilon(1e-12));
  // shifting into the bulk can only raise the density: ratio > 1 toward 0
  CHECK(cutoff_shift_ratio(1.5, 0.7, 1.3, 1.3, 0) > 1.0);
}

TEST_CASE("sweep checks are self-similarity invariant within one percent") {
  auto a = check_derivative_bounds(1.5, 0, 1);
  auto b = check_derivative_bounds(1.5, 0, 1, 0, 2.8284271247461903);  // 2^{3/2}
  CHECK(a.pass);
  CHECK(b.pass);
  CHECK(a.constant == doctest::Approx(b.constant).epsilon(0.01));

  auto m1 = check_spatial_moments(1.5, 2.0, 0.5);
  auto m2 = check_spatial_moments(1.5, 2.0, 0.5, 0, 3.0);
  CHECK(m1.pass);
  CHECK(m1.constant == doctest::Approx(m2.constant).epsilon(0.01));
}

TEST_CASE("derivative sweep pins the cauchy supremum") {
  auto rep = check_derivative_bounds(1.0, 0, 1);
  CHECK(rep.pass);
  // the sweep contains the diagonal xi = 1, where the ratio is exactly 1
  CHECK(rep.constant == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(rep.refinement_drift < 0.10);
  CHECK(rep.points > 500);
}

TEST_CASE("cutoff negligibility: a saturating field equals the threshold field") {
  // |b| huge: the bar cutoff clips it to exactly B h^{1/alpha - 1}, so the
  // sweep cannot tell it apart from a drift that is constantly the threshold
  const double h = 0.01;
  const double thr = cutoff_threshold(CutoffVariant::bar, 1.5, 1, kInf, kInf, h, 1.0);
  auto big = constant_drift({1e9});
  auto at_thr = constant_drift({thr});
  auto tab1 = check_cutoff_negligible(1.5, big, CutoffVariant::bar, 1.0, h);
  auto tab2 = check_cutoff_negligible(1.5, at_thr, CutoffVariant::bar, 1.0, h);
  CHECK(tab1.pass);
  CHECK(tab1.constant == doctest::Approx(tab2.constant).epsilon(1e-12));
  CHECK(tab1.constant > 0.0);
  CHECK(std::isfinite(tab1.constant));
  CHECK_THROWS_AS(check_cutoff_negligible(1.5, big, CutoffVariant::bar, 1.0, 1.5),
                  std::domain_error);
}

TEST_CASE("holder sweeps pass at the canonical alpha") {
  CHECK(check_holder_space(1.5, 0, 0.5).pass);
  CHECK(check_holder_time(1.5, 0, 0.5).pass);
}
