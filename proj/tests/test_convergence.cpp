#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "sdelab/convergence.hpp"

using namespace sdelab;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

DensityGrid kernel_grid(double alpha, double t, double x0, const Lattice& lattice) {
  auto tab = StableKernelTable::get(alpha);
  DensityGrid g;
  g.lattice = lattice;
  g.time = t;
  g.values.resize(lattice.size());
  for (std::size_t i = 0; i < g.values.size(); ++i)
    g.values[i] = tab->p(t, lattice.coord(i, 0) - x0);
  g.recompute_mass();
  return g;
}
}  // namespace

TEST_CASE("weighted error: zero on itself, exact for a weighted perturbation") {
  auto lattice = Lattice::centered(1, {0.1, 0.0}, 6.0, 100);
  auto a = kernel_grid(1.5, 1.0, 0.1, lattice);
  StableParams ps{1.5, 1};
  CHECK(weighted_error(a, a, ps, 0.1).value == 0.0);

  auto tab = StableKernelTable::get(1.5);
  DensityGrid b = a;
  const double eps = 3e-3;
  for (std::size_t i = 0; i < b.values.size(); ++i)
    b.values[i] += eps * tab->p(1.0, lattice.coord(i, 0) - 0.1);
  const auto we = weighted_error(a, b, ps, 0.1);
  CHECK(we.value == doctest::Approx(eps).epsilon(1e-9));

  DensityGrid other = kernel_grid(1.5, 1.0, 0.1, Lattice::centered(1, {0.0, 0.0}, 6.0, 100));
  CHECK_THROWS_AS(weighted_error(a, other, ps, 0.1), std::invalid_argument);
}

TEST_CASE("rate experiment on a small ladder") {
  RateConfig rc;
  rc.params = {1.5, 1};
  rc.drift = builtin_singular_drift("radial", 1.0, 0.2, 0.0, 1.0, 1, 4.0, kInf);
  rc.ladder = {8, 16};
  rc.lattice_points = 120;
  rc.duhamel_nodes = 32;
  auto rep = rate_experiment(rc);
  CHECK(rep.gamma == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(rep.theoretical_rate == doctest::Approx(0.25 / 1.5).epsilon(1e-12));
  CHECK(rep.points.size() == 2);
  CHECK(rep.points[0].h == doctest::Approx(0.125));
  CHECK(rep.points[0].error > rep.points[1].error);  // refinement helps
  CHECK(std::isfinite(rep.slope));
  CHECK(rep.slope > 0.0);
  CHECK(!rep.degenerate);
  for (const auto& pt : rep.points) {
    CHECK(pt.noise_floor > 0.0);
    CHECK(pt.usable);
  }
}

TEST_CASE("richardson reference excludes the finest run from the fit") {
  RateConfig rc;
  rc.params = {1.5, 1};
  rc.drift = builtin_singular_drift("radial", 1.0, 0.2, 0.0, 1.0, 1, 4.0, kInf);
  rc.ladder = {4, 8, 16};
  rc.lattice_points = 100;
  rc.reference = "richardson";
  auto rep = rate_experiment(rc);
  CHECK(rep.reference == "richardson");
  CHECK(rep.points.size() == 3);
  CHECK(rep.points.back().note == "reference point");
  CHECK(!rep.points.back().usable);
  CHECK(rep.points[0].usable);
  CHECK(std::isfinite(rep.slope));
}

TEST_CASE("zero drift ladder drops below the calibration floor") {
  RateConfig rc;
  rc.params = {1.5, 1};
  rc.drift = zero_drift(1);
  rc.ladder = {8, 16};
  rc.lattice_points = 80;
  rc.duhamel_nodes = 24;
  auto rep = rate_experiment(rc);
  // the scheme error *is* the calibration error, so every point sits below
  // the 3x floor and the fit is declared degenerate rather than faked
  CHECK(rep.degenerate);
  CHECK(!rep.pass);
  for (const auto& pt : rep.points) CHECK(pt.below_floor);
  CHECK(rep.note == "fewer than two usable ladder points");
}

TEST_CASE("eval time must sit on every ladder grid") {
  RateConfig rc;
  rc.params = {1.5, 1};
  rc.drift = zero_drift(1);
  rc.ladder = {8, 16};
  rc.eval_time = 0.3;
  CHECK_THROWS_AS(rate_experiment(rc), std::invalid_argument);
  CHECK_THROWS_AS([&] {
    RateConfig bad = rc;
    bad.eval_time = 0.0;
    bad.ladder = {8};
    return rate_experiment(bad);
  }(), std::invalid_argument);
}

TEST_CASE("emit_report writes the three artifacts") {
  RateReport rep;
  rep.alpha = 1.5;
  rep.gamma = 0.25;
  rep.theoretical_rate = 0.25 / 1.5;
  rep.slope = 0.2;
  rep.reference = "duhamel";
  rep.eval_time = 1.0;
  rep.pass = true;
  RatePoint p1{8, 0.125, 0.1, 0.001, false, true, ""};
  RatePoint p2{16, 0.0625, 0.06, 0.001, false, true, ""};
  rep.points = {p1, p2};

  const std::string dir = "emit_report_test_out";
  emit_report(rep, dir);
  CHECK(std::filesystem::exists(dir + "/ladder.csv"));
  CHECK(std::filesystem::exists(dir + "/fit.json"));
  CHECK(std::filesystem::exists(dir + "/plot.gp"));

  std::ifstream csv(dir + "/ladder.csv");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 3);  // header + 2 ladder points
  std::filesystem::remove_all(dir);
}
