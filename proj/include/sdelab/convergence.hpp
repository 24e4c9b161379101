#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sdelab/density_grid.hpp"
#include "sdelab/drift.hpp"
#include "sdelab/duhamel.hpp"

namespace sdelab {

// sup over the lattice of |a - b| / p_alpha(time, y - x0): the natural metric
// for a bound of the form  |G^h - G| <= C h^{gamma/alpha} p_alpha.
struct WeightedError {
  double value = 0.0;
  double at = 0.0;          // coordinate attaining the sup
  std::size_t excluded = 0; // weight below 1e-12
};

WeightedError weighted_error(const DensityGrid& a, const DensityGrid& b,
                             const StableParams& params, double x0);

struct RatePoint {
  std::size_t steps = 0;
  double h = 0.0;
  double error = std::numeric_limits<double>::quiet_NaN();
  double noise_floor = 0.0;  // 3x the zero-drift calibration error at this n
  bool below_floor = false;
  bool usable = false;
  std::string note;
};

struct RateConfig {
  StableParams params;
  DriftPtr drift;
  double x0 = 0.1;
  double horizon = 1.0;
  double eval_time = 0.0;  // 0: evaluate at the horizon
  std::vector<std::size_t> ladder = {8, 16, 32, 64};
  CutoffVariant variant = CutoffVariant::standard;
  double cutoff_B = 1.0;
  std::string reference = "duhamel";  // or "richardson" (finest ladder run)
  std::size_t lattice_points = 200;
  double half_width = 0.0;  // 0: 8 t^{1/alpha}
  std::size_t duhamel_nodes = 64;
  double duhamel_tolerance = 1e-6;
  std::size_t duhamel_max_iterations = 40;
  std::uint64_t seed = 0x5de1ab;  // recorded in run manifests only
  int workers = 0;
};

struct RateReport {
  std::vector<RatePoint> points;
  std::string reference;
  double alpha = 0.0;
  double gamma = 0.0;
  double theoretical_rate = 0.0;  // gamma / alpha
  double slope = std::numeric_limits<double>::quiet_NaN();
  double fit_residual = 0.0;  // rms log-log fit residual over usable points
  double tolerance_band = 0.15;
  bool degenerate = false;  // fewer than two usable ladder points
  bool pass = false;
  std::string note;
  double eval_time = 0.0;
  double x0 = 0.0;
  std::string drift_description;
};

// Ladder of scheme densities against a reference limit density; fits the
// weighted error against h in log-log. Points whose error sits below the
// zero-drift calibration floor are excluded from the fit and flagged.
RateReport rate_experiment(const RateConfig& cfg);

// ladder.csv, fit.json and plot.gp under `directory` (created if needed).
void emit_report(const RateReport& report, const std::string& directory);

}  // namespace sdelab
