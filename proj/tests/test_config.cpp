#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "sdelab/config.hpp"

using namespace sdelab;

namespace {

bool has_issue(const ConfigError& e, const std::string& needle) {
  return std::any_of(e.issues.begin(), e.issues.end(), [&](const std::string& s) {
    return s.find(needle) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("empty text yields the documented defaults") {
  const auto cfg = parse_config_text("");
  CHECK(cfg.params.alpha == 1.5);
  CHECK(cfg.params.dim == 1);
  CHECK(cfg.drift_decl == "zero");
  CHECK(cfg.steps == 16);
  CHECK(cfg.horizon == 1.0);
  CHECK(cfg.variant == CutoffVariant::standard);
  CHECK(cfg.ladder == std::vector<std::size_t>{8, 16, 32, 64});
  CHECK(cfg.reference == "duhamel");
  CHECK(std::isinf(cfg.p));
  CHECK(std::isinf(cfg.q));
  CHECK(cfg.make_drift()->eval(0.5, {2.0}) == std::vector<double>{0.0});
}

TEST_CASE("a full file parses with comments and blank lines") {
  const std::string text =
      "# weekly rate study\n"
      "alpha = 1.2\n"
      "dim = 2\n"
      "\n"
      "drift = constant:c=0.3,c2=-0.1   # pushes north-east\n"
      "T = 0.5\n"
      "steps = 32\n"
      "variant = bar\n"
      "cutoff_B = 2.0\n"
      "x0 = 0.1, -0.2\n"
      "seed = 99\n"
      "paths = 500\n"
      "lattice_points = 64\n"
      "half_width = 3\n"
      "bandwidth = 0.05\n"
      "eval_time = 0.25\n"
      "duhamel_nodes = 16\n"
      "duhamel_tolerance = 1e-5\n"
      "duhamel_max_iterations = 12\n"
      "ladder = 4,8,16\n"
      "reference = richardson\n"
      "out = /tmp/run7\n"
      "workers = 3\n";
  const auto cfg = parse_config_text(text);
  CHECK(cfg.params.alpha == 1.2);
  CHECK(cfg.params.dim == 2);
  CHECK(cfg.horizon == 0.5);
  CHECK(cfg.steps == 32);
  CHECK(cfg.variant == CutoffVariant::bar);
  CHECK(cfg.cutoff_B == 2.0);
  CHECK(cfg.x0 == std::vector<double>{0.1, -0.2});
  CHECK(cfg.seed == 99);
  CHECK(cfg.paths == 500);
  CHECK(cfg.lattice_points == 64);
  CHECK(cfg.half_width == 3.0);
  CHECK(cfg.bandwidth == 0.05);
  CHECK(cfg.eval_time == 0.25);
  CHECK(cfg.duhamel_nodes == 16);
  CHECK(cfg.duhamel_tolerance == 1e-5);
  CHECK(cfg.duhamel_max_iterations == 12);
  CHECK(cfg.ladder == std::vector<std::size_t>{4, 8, 16});
  CHECK(cfg.reference == "richardson");
  CHECK(cfg.out_dir == "/tmp/run7");
  CHECK(cfg.workers == 3);

  const auto sc = cfg.scheme();
  CHECK(sc.params.alpha == 1.2);
  CHECK(sc.steps == 32);
  CHECK(sc.variant == CutoffVariant::bar);
  CHECK(sc.x0 == cfg.x0);
  CHECK(sc.seed == 99);

  const auto drift = cfg.make_drift();
  const auto v = drift->eval(0.1, {0.0, 0.0});
  CHECK(v[0] == doctest::Approx(0.3));
  CHECK(v[1] == doctest::Approx(-0.1));
}

TEST_CASE("every problem is reported at once, not just the first") {
  const std::string text =
      "alpha = 2.5\n"
      "steps = 0\n"
      "lattice_points = 1\n"
      "duhamel_nodes = 2\n";
  try {
    parse_config_text(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.issues.size() == 4);
    CHECK(has_issue(e, "alpha"));
    CHECK(has_issue(e, "steps"));
    CHECK(has_issue(e, "lattice_points"));
    CHECK(has_issue(e, "duhamel_nodes"));
    CHECK(std::string(e.what()).find("configuration invalid (4 issues)") != std::string::npos);
  }
}

TEST_CASE("typos get a nearest-key suggestion") {
  try {
    parse_config_text("step = 8\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(has_issue(e, "unknown key 'step'"));
    CHECK(has_issue(e, "did you mean 'steps'?"));
  }
}

TEST_CASE("a supercritical declared class is rejected even for benign kinds") {
  // constant drift is bounded, but the declared (p, q) class must satisfy the
  // Serrin condition too: the scheme guarantees are stated for the class
  const std::string text =
      "alpha = 1.5\n"
      "drift = constant:c=1\n"
      "p = 2\n"
      "q = 2\n";
  try {
    parse_config_text(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(has_issue(e, "Serrin"));
  }

  // subcritical declared class passes
  CHECK_NOTHROW(parse_config_text("alpha = 1.5\ndrift = constant:c=1\np = 4\nq = 8\n"));
}

TEST_CASE("supercritical radial drift is rejected with the gap spelled out") {
  const std::string text =
      "alpha = 1.5\n"
      "drift = radial:beta=0.2,c=1,R=1\n"
      "p = 2\n"
      "q = 2\n";
  CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("Serrin"), ConfigError);
}

TEST_CASE("x0 must match the dimension when given") {
  CHECK_THROWS_WITH_AS(parse_config_text("dim = 2\nx0 = 0.5\n"),
                       doctest::Contains("expected 2 coordinates"), ConfigError);
  CHECK_NOTHROW(parse_config_text("dim = 2\nx0 = 0.5, 0.5\n"));
  CHECK_NOTHROW(parse_config_text("dim = 2\n"));  // empty x0 means the origin
}

TEST_CASE("malformed lines and values are pinned to their key or line") {
  try {
    parse_config_text("just some words\nseed = -3\nalpha = fast\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.issues.size() == 3);
    CHECK(has_issue(e, "line 1"));
    CHECK(has_issue(e, "seed"));
    CHECK(has_issue(e, "alpha"));
  }
}

TEST_CASE("drift declarations: kinds, parameters, and rejections") {
  constexpr double inf = std::numeric_limits<double>::infinity();

  CHECK(parse_drift_declaration("zero", inf, inf, 1)->eval(0.0, {1.0}) ==
        std::vector<double>{0.0});

  auto radial = parse_drift_declaration("radial:beta=0.2,c=0.7,R=2", 4.0, inf, 1);
  CHECK(radial->p_exponent() == 4.0);
  CHECK(radial->eval(0.5, {1.0})[0] == doctest::Approx(0.7));

  CHECK_THROWS_WITH_AS(parse_drift_declaration("spiral", inf, inf, 1),
                       doctest::Contains("unknown drift kind 'spiral'"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_drift_declaration("radial:curl=1", inf, inf, 1),
                       doctest::Contains("unknown parameter 'curl'"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_drift_declaration("constant:c", inf, inf, 1),
                       doctest::Contains("expected key=value"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_drift_declaration("tabulated", inf, inf, 1),
                       doctest::Contains("requires file="), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_drift_declaration("tabulated:file=/no/such/table.csv", inf, inf, 1),
                       doctest::Contains("not readable"), std::invalid_argument);
}

TEST_CASE("tabulated drift reads a csv with a header row") {
  const std::string path = "config_test_table.csv";
  {
    std::ofstream out(path);
    out << "x,value\n-1,0.5\n0,1.0\n1,0.5\n";
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto drift = parse_drift_declaration("tabulated:file=" + path, inf, inf, 1);
  CHECK(drift->eval(0.3, {0.0})[0] == doctest::Approx(1.0));
  CHECK(drift->eval(0.3, {0.5})[0] == doctest::Approx(0.75));
  CHECK(drift->eval(0.3, {5.0})[0] == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("parse_config reports an unreadable file as a config issue") {
  CHECK_THROWS_WITH_AS(parse_config("/no/such/dir/exp.cfg"),
                       doctest::Contains("cannot open config file"), ConfigError);
}
