#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sdelab/density_grid.hpp"
#include "sdelab/duhamel.hpp"
#include "sdelab/euler.hpp"

namespace sdelab {

// %.17g -- round-trip exact for binary64
std::string format_double(double v);

// header: path_id,t,x_1..x_d; one row per (path, time) pair
void write_marginal_csv(const MarginalSample& samples, const std::string& path);
void write_paths_csv(const PathSet& paths, const std::string& path);

// compact block: 64-bit little-endian header {magic "SDLBPATH", n, d, count}
// followed by count * n * d doubles, row-major (path, time, coordinate)
void write_paths_binary(const PathSet& paths, const std::string& path);
PathSet read_paths_binary(const std::string& path);

// node coordinates + values; 1-d: y,value  2-d: y1,y2,value
void write_density_csv(const DensityGrid& grid, const std::string& path);
// JSON metadata: time, mass, tail_mass, bandwidth, lattice geometry,
// reference-floor exclusions
void write_density_meta(const DensityGrid& grid, const std::string& path,
                        std::size_t exclusions = 0);

// slice_000.csv .. plus solution.json (iterations, residual history, clamps)
void write_duhamel_solution(const DuhamelSolution& sol, const std::string& directory);

struct Manifest {
  std::string command;
  std::uint64_t config_hash = 0;
  double elapsed_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> entries;
};

// manifest.json: command line, config hash, library version, timing
void write_manifest(const Manifest& m, const std::string& path);

// structured error artifact emitted by the CLI on module failures
void write_error_json(const std::string& path, const std::string& kind,
                      const std::string& message);

}  // namespace sdelab
