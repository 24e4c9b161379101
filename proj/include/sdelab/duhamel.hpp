#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdelab/density_grid.hpp"
#include "sdelab/drift.hpp"
#include "sdelab/euler.hpp"
#include "sdelab/stable_kernel.hpp"

namespace sdelab {

// Discretization of the Duhamel fixed point in d = 1. The space lattice is
// the requested output window; internally the solvers work on an enlarged
// copy (same spacing) so that edge truncation of the space convolution does
// not pollute the window.
struct SpaceTimeGrid {
  Lattice lattice;                 // output window, 1-d
  std::vector<double> time_nodes;  // strictly increasing, last = evaluation time
};

// Geometric node layout refined toward both endpoints (integrands are least
// regular near r = 0 and r = t): eps_rel*t, ..., t/2 mirrored, plus t.
std::vector<double> duhamel_time_nodes(double t, std::size_t count, double eps_rel = 1e-2);

struct DuhamelSolution {
  DensityGrid grid;                 // density at the final time on the window
  std::vector<double> slice_times;
  std::vector<DensityGrid> slices;  // one window restriction per slice time
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;  // weighted sup distance per iteration
  double residual = 0.0;
  std::size_t clamped = 0;  // negative quadrature artifacts clamped to 0
};

// Picard non-convergence; carries the residual history (grid too coarse or
// the drift too close to supercritical).
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::string msg, std::vector<double> history)
      : std::runtime_error(std::move(msg)), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

// Limit density via Picard iteration on
//   G = p_alpha - int_0^t int G(r,z) b(r,z) d/dy p_alpha(t-r, y-z) dz dr,
// starting from G^0 = p_alpha. The time integral uses product integration
// against the (t-r)^{-1/alpha} gradient scale away from r = t and an
// integrated-by-parts form (divergence against p_alpha itself) on the last
// (1.5 dz)^alpha of the interval, where the gradient dipole is too narrow
// for the lattice. Stops when successive iterates differ by less than
// `tolerance` in sup_y |dG| / p_alpha(t, y - x0).
DuhamelSolution solve_diffusion_duhamel(const StableParams& params, const DriftPtr& drift,
                                        double x0, double T, const SpaceTimeGrid& grid,
                                        std::size_t max_iterations = 40, double tolerance = 1e-6,
                                        int workers = 0);

// One-step transition density of the randomized scheme,
//   (1/h) int_{s}^{s+h} p_alpha(h, y - z - h b_h(r, z)) dr,
// by averaging over `time_nodes` midpoint r-nodes (1 node is exact for
// time-independent drift). `drift_h` is the already-cutoff field.
double scheme_transition_kernel(double z, double y, double h, const Drift& drift_h,
                                const StableParams& params, double step_start, int time_nodes = 1);

// Exact lattice chaining of the one-step kernels: the first step maps the
// starting point onto the lattice, later steps convolve. Off-lattice kernel
// mass is accumulated into tail_mass; accumulated loss > 1% throws a
// lattice-extent error (std::length_error). Slices at grid times t_1..t_n.
DuhamelSolution solve_scheme_density(const SchemeConfig& cfg, const DriftPtr& drift,
                                     const Lattice& lattice, int workers = 0);

struct SchemeResidual {
  double value = 0.0;      // sup over the window of |lhs - rhs|
  double std_error = 0.0;  // Monte Carlo standard error at the attaining point
  double at = 0.0;
  std::size_t paths = 0;
};

// Monte Carlo check of the scheme's own Duhamel identity:
//   G^h(t,y) = p_alpha(t, y-x0) - int_0^t E[ b_h(U_k, X_{t_k}) d/dy p_alpha(t-r, y-X_r) ] dr
// with k = floor(r/h); the expectation is estimated over fresh scheme paths
// sub-sampled at `nodes_per_step` r-nodes per step (left nodes, weights
// product-integrated against the (t-r)^{-1/alpha} endpoint scale).
SchemeResidual duhamel_residual_scheme(const DensityGrid& scheme_density, const SchemeConfig& cfg,
                                       const DriftPtr& drift, std::size_t mc_paths,
                                       int nodes_per_step = 8, int workers = 0);

}  // namespace sdelab
