#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdelab/drift.hpp"
#include "sdelab/euler.hpp"

namespace sdelab {

// Key = value experiment description (one pair per line, '#' comments).
// Parsing is eager and total: every problem in the file is reported in one
// ConfigError rather than failing at first sight.
struct ExperimentConfig {
  StableParams params{1.5, 1};

  std::string drift_decl = "zero";  // e.g. "radial:beta=0.3,c=1,R=1"
  double p = std::numeric_limits<double>::infinity();
  double q = std::numeric_limits<double>::infinity();

  double horizon = 1.0;
  std::uint64_t steps = 16;
  CutoffVariant variant = CutoffVariant::standard;
  double cutoff_B = 1.0;
  std::vector<double> x0;
  std::uint64_t seed = 1;
  std::size_t paths = 10000;

  std::size_t lattice_points = 200;
  double half_width = 0.0;  // 0: 8 t^{1/alpha}
  double bandwidth = 0.0;   // 0: data-driven rule
  double eval_time = 0.0;   // 0: horizon

  std::size_t duhamel_nodes = 64;
  double duhamel_tolerance = 1e-6;
  std::size_t duhamel_max_iterations = 40;

  std::vector<std::size_t> ladder = {8, 16, 32, 64};
  std::string reference = "duhamel";

  std::string out_dir = "out";
  int workers = 0;

  DriftPtr make_drift() const;
  SchemeConfig scheme() const;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  std::vector<std::string> issues;
};

// "kind" or "kind:key=value,key=value"; kinds zero|constant|smooth|radial|
// tabulated (tabulated takes file=<csv of x,value rows>)
DriftPtr parse_drift_declaration(const std::string& decl, double p, double q, int dim);

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& file);

}  // namespace sdelab
