#include <doctest.h>

#include <cmath>

#include "sdelab/density_mc.hpp"

using namespace sdelab;

namespace {

MarginalSample stable_sample(double alpha, std::size_t n, std::uint64_t seed) {
  SchemeConfig cfg;
  cfg.params = {alpha, 1};
  cfg.steps = 1;
  cfg.seed = seed;
  auto m = simulate_marginal(cfg, zero_drift(1), 1.0, n);
  return m;
}

}  // namespace

TEST_CASE("kde total mass accounts for the tail") {
  auto m = stable_sample(1.5, 5000, 17);
  auto lattice = Lattice::centered(1, {0.0, 0.0}, 6.0, 120);
  auto grid = kde_estimate(m, lattice, 0.3);
  CHECK(grid.mass + grid.tail_mass == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(grid.mass > 0.9);
  CHECK(grid.bandwidth == 0.3);
  for (double v : grid.values) CHECK(v >= 0.0);
}

TEST_CASE("zero drift kde approximates the stable density") {
  auto m = stable_sample(1.5, 30000, 71);
  const double hw = default_half_width(1.5, 1.0);
  auto lattice = Lattice::centered(1, {0.0, 0.0}, hw, 160);
  const double bw = default_bandwidth(m, lattice, 1.5, 1.0);
  auto grid = kde_estimate(m, lattice, bw);
  auto tab = StableKernelTable::get(1.5);
  double sup = 0.0;
  for (std::size_t i = 0; i < grid.values.size(); ++i)
    sup = std::max(sup, std::abs(grid.values[i] - tab->p(1.0, lattice.coord(i, 0))));
  CHECK(sup < 0.02);
}

TEST_CASE("kde commutes with a change of scale") {
  auto m = stable_sample(1.5, 500, 3);
  auto lattice = Lattice::centered(1, {0.0, 0.0}, 5.0, 64);
  auto grid = kde_estimate(m, lattice, 0.4);

  MarginalSample doubled = m;
  for (double& x : doubled.data) x *= 2.0;
  auto lattice2 = Lattice::centered(1, {0.0, 0.0}, 10.0, 64);
  auto grid2 = kde_estimate(doubled, lattice2, 0.8);
  // Y = 2X: p_Y(2x) = p_X(x)/2, exactly inherited by the gaussian KDE
  for (std::size_t i = 0; i < grid.values.size(); ++i)
    CHECK(grid2.values[i] == doctest::Approx(grid.values[i] / 2.0).epsilon(1e-12));
}

TEST_CASE("default bandwidth follows the IQR rule and its clips") {
  // synthetic sample with known quartiles: uniform grid on [-1, 1]
  MarginalSample m;
  m.time = 1.0;
  m.count = 4001;
  m.dim = 1;
  for (std::size_t i = 0; i < m.count; ++i)
    m.data.push_back(-1.0 + 2.0 * static_cast<double>(i) / 4000.0);
  auto lattice = Lattice::centered(1, {0.0, 0.0}, 8.0, 100);
  const double iqr = 1.0;  // quartiles at -0.5, 0.5
  const double expected =
      1.06 * (iqr / 1.349) * std::pow(static_cast<double>(m.count), -0.2);
  CHECK(default_bandwidth(m, lattice, 1.5, 0.1) == doctest::Approx(expected).epsilon(1e-2));

  // tiny step floors the bandwidth at h^{1/alpha}/4
  MarginalSample tight = m;
  for (double& x : tight.data) x *= 1e-6;
  const double floor_bw = std::pow(1e-4, 1.0 / 1.5) / 4.0;
  CHECK(default_bandwidth(tight, lattice, 1.5, 1e-4) == doctest::Approx(floor_bw).epsilon(1e-12));
  // huge spread caps at extent/8
  MarginalSample wide = m;
  for (double& x : wide.data) x *= 1e4;
  CHECK(default_bandwidth(wide, lattice, 1.5, 0.1) == doctest::Approx(16.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("heat kernel ratio is exactly one for the kernel itself") {
  auto tab = StableKernelTable::get(1.5);
  auto lattice = Lattice::centered(1, {0.3, 0.0}, 6.0, 90);
  DensityGrid grid;
  grid.lattice = lattice;
  grid.time = 1.0;
  grid.values.resize(lattice.size());
  for (std::size_t i = 0; i < grid.values.size(); ++i)
    grid.values[i] = tab->p(1.0, lattice.coord(i, 0) - 0.3);
  grid.recompute_mass();

  auto stat = heat_kernel_ratio(grid, {1.5, 1}, {0.3, 0.0});
  CHECK(stat.value == doctest::Approx(1.0).epsilon(2e-7));
  CHECK(stat.excluded == 0);

  for (double& v : grid.values) v *= 2.0;
  auto stat2 = heat_kernel_ratio(grid, {1.5, 1}, {0.3, 0.0});
  CHECK(stat2.value == doctest::Approx(2.0).epsilon(2e-7));
}

TEST_CASE("holder statistic vanishes for a flat grid and is finite for the kernel") {
  auto lattice = Lattice::centered(1, {0.0, 0.0}, 4.0, 80);
  DensityGrid flat;
  flat.lattice = lattice;
  flat.time = 1.0;
  flat.values.assign(lattice.size(), 0.25);
  flat.recompute_mass();
  auto s0 = holder_space_statistic(flat, {1.5, 1}, {0.0, 0.0}, 1.0);
  CHECK(s0.value == doctest::Approx(0.0));

  auto tab = StableKernelTable::get(1.5);
  DensityGrid kern = flat;
  for (std::size_t i = 0; i < kern.values.size(); ++i)
    kern.values[i] = tab->p(1.0, lattice.coord(i, 0));
  kern.recompute_mass();
  auto s1 = holder_space_statistic(kern, {1.5, 1}, {0.0, 0.0}, 1.0);
  CHECK(s1.value > 0.0);
  CHECK(std::isfinite(s1.value));
  CHECK(s1.considered > 100);
}

TEST_CASE("kde is deterministic across worker counts") {
  auto m = stable_sample(1.7, 4000, 9);
  auto lattice = Lattice::centered(1, {0.0, 0.0}, 6.0, 128);
  auto a = kde_estimate(m, lattice, 0.25, 1);
  auto b = kde_estimate(m, lattice, 0.25, 6);
  CHECK(a.values == b.values);
  CHECK(a.mass == b.mass);
}
