#pragma once

#include <array>
#include <cstddef>

#include "sdelab/density_grid.hpp"
#include "sdelab/euler.hpp"
#include "sdelab/stable_kernel.hpp"

namespace sdelab {

// Gaussian-kernel density estimate of a marginal sample on a lattice.
// Mass inside the lattice plus the reported tail mass adds to 1 up to
// far-tail truncation of the kernel (~1e-15 per sample).
DensityGrid kde_estimate(const MarginalSample& samples, const Lattice& lattice, double bandwidth,
                         int workers = 0);

// 1.06 * sigma * N^{-1/5} with sigma = IQR/1.349 (heavy tails make the raw
// standard deviation useless), clipped to [h^{1/alpha}/4, lattice extent/8].
double default_bandwidth(const MarginalSample& samples, const Lattice& lattice, double alpha,
                         double step);

// extent of the default estimation window around x0 at time t
double default_half_width(double alpha, double t);

struct RatioStat {
  double value = 0.0;
  std::array<double, 2> at{};        // lattice point attaining the sup
  std::size_t excluded = 0;          // reference-underflow points skipped
  std::size_t considered = 0;
};

// sup over the lattice of estimate / p_alpha(t, y - x0); reference values
// below 1e-12 are excluded (and counted) to avoid division blowup.
RatioStat heat_kernel_ratio(const DensityGrid& grid, const StableParams& reference,
                            const std::array<double, 2>& x0);

struct PairStat {
  double value = 0.0;
  std::array<double, 2> at_a{};
  std::array<double, 2> at_b{};
  std::size_t excluded = 0;
  std::size_t considered = 0;  // pairs
};

// Empirical Hölder-in-space constant: sup over lattice pairs of
//   |G(y) - G(y')| / [ (|y-y'|^g ∧ t^{g/a}) / t^{g/a} * (p(t,y-x0) + p(t,y'-x0)) ].
// Pairs are taken on a deterministic stride keeping at most ~512 base points.
PairStat holder_space_statistic(const DensityGrid& grid, const StableParams& reference,
                                const std::array<double, 2>& x0, double gamma);

}  // namespace sdelab
