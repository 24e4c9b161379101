#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdelab/euler.hpp"

using namespace sdelab;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

SchemeConfig base_cfg(std::uint64_t steps = 16, std::uint64_t seed = 5) {
  SchemeConfig cfg;
  cfg.params = {1.5, 1};
  cfg.horizon = 1.0;
  cfg.steps = steps;
  cfg.seed = seed;
  return cfg;
}
}  // namespace

TEST_CASE("marginal at a grid time matches the stored trajectory bit for bit") {
  auto cfg = base_cfg();
  auto b = builtin_singular_drift("smooth", 1.0, 0.0, 0.0, 1.0, 1, kInf, kInf);
  auto paths = simulate_paths(cfg, b, 50);
  auto marginal = simulate_marginal(cfg, b, 0.5, 50);
  // t = 0.5 is step 8 of 16
  for (std::size_t p = 0; p < 50; ++p) CHECK(paths.at(p, 8)[0] == marginal.row(p)[0]);
  CHECK(paths.config == marginal.config);
  CHECK(paths.times.size() == 17);
  CHECK(paths.times[8] == doctest::Approx(0.5));
}

TEST_CASE("worker count does not change results") {
  auto cfg = base_cfg();
  auto b = builtin_singular_drift("radial", 1.0, 0.2, 0.0, 1.0, 1, 4.0, kInf);
  cfg.workers = 1;
  auto one = simulate_marginal(cfg, b, 1.0, 200);
  cfg.workers = 7;
  auto many = simulate_marginal(cfg, b, 1.0, 200);
  CHECK(one.data == many.data);
}

TEST_CASE("zero drift paths are translation equivariant in x0") {
  auto cfg = base_cfg();
  auto z = zero_drift(1);
  auto at0 = simulate_marginal(cfg, z, 1.0, 40);
  cfg.x0 = {2.5};
  auto at25 = simulate_marginal(cfg, z, 1.0, 40);
  for (std::size_t p = 0; p < 40; ++p)
    CHECK(at25.row(p)[0] == doctest::Approx(at0.row(p)[0] + 2.5).epsilon(1e-15));
}

TEST_CASE("p = q = inf: the standard cutoff is a no-op on the scheme") {
  auto b = builtin_singular_drift("smooth", 2.0, 0.0, 0.0, 1.0, 1, kInf, kInf);
  auto cfg = base_cfg();
  cfg.variant = CutoffVariant::standard;
  auto cut = simulate_marginal(cfg, b, 1.0, 60);
  cfg.variant = CutoffVariant::none;
  auto raw = simulate_marginal(cfg, b, 1.0, 60);
  CHECK(cut.data == raw.data);
}

TEST_CASE("bar variant freezes the drift on the first step") {
  auto c = constant_drift({1.0});
  auto cfg = base_cfg(4);
  cfg.variant = CutoffVariant::none;
  auto plain = simulate_paths(cfg, c, 30);
  cfg.variant = CutoffVariant::bar;
  auto bar = simulate_paths(cfg, c, 30);
  const double h = cfg.step_size();
  // |b| = 1 < bar threshold h^{-1/3} ~ 1.59, so the only difference is the
  // zeroed first step: trajectories separate by exactly h*c from step 1 on
  for (std::size_t p = 0; p < 30; ++p) {
    CHECK(bar.at(p, 0)[0] == plain.at(p, 0)[0]);
    for (std::size_t k = 1; k <= 4; ++k)
      CHECK(bar.at(p, k)[0] == doctest::Approx(plain.at(p, k)[0] - 1.0 * h).epsilon(1e-14));
  }
}

TEST_CASE("zero drift marginal looks like the stable law") {
  auto cfg = base_cfg(8, 31);
  auto z = zero_drift(1);
  auto m = simulate_marginal(cfg, z, 1.0, 20000);
  std::vector<double> v(m.data);
  std::sort(v.begin(), v.end());
  // median near 0, and the law is symmetric: |q25| ~ q75
  const double med = v[v.size() / 2];
  const double q25 = v[v.size() / 4], q75 = v[3 * v.size() / 4];
  CHECK(std::abs(med) < 0.03);
  CHECK(q75 == doctest::Approx(-q25).epsilon(0.06));
  CHECK(q75 == doctest::Approx(0.9689331817).epsilon(0.05));  // unit-time quartile, alpha = 1.5
}

TEST_CASE("config hash separates schemes, ignores nothing it should not") {
  auto b = zero_drift(1);
  auto c = constant_drift({1.0});
  auto cfg = base_cfg();
  const auto h0 = config_hash(cfg, *b);
  CHECK(config_hash(cfg, *b) == h0);
  CHECK(config_hash(cfg, *c) != h0);
  auto cfg2 = cfg;
  cfg2.seed = 6;
  CHECK(config_hash(cfg2, *b) != h0);
  auto cfg3 = cfg;
  cfg3.steps = 32;
  CHECK(config_hash(cfg3, *b) != h0);
  auto cfg4 = cfg;
  cfg4.variant = CutoffVariant::bar;
  CHECK(config_hash(cfg4, *b) != h0);
}

TEST_CASE("scheme validation and the path memory guard") {
  auto cfg = base_cfg();
  cfg.steps = 0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = base_cfg();
  cfg.x0 = {1.0, 2.0};  // dim mismatch
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = base_cfg();
  CHECK_THROWS_AS(simulate_paths(cfg, zero_drift(1), 1000, /*memory_budget=*/1024),
                  std::length_error);
  CHECK_THROWS_AS(simulate_marginal(cfg, zero_drift(1), 2.0, 10), std::domain_error);
  CHECK_THROWS_AS(simulate_marginal(cfg, zero_drift(2), 1.0, 10), std::invalid_argument);
}
