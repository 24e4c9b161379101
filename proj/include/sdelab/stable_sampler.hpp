#pragma once

#include <cstdint>
#include <vector>

#include "sdelab/stable_kernel.hpp"

namespace sdelab {

// Counter-based sampling of isotropic alpha-stable increments via Gaussian
// subordination. Identical (seed, path, step) triples reproduce identical
// draws regardless of execution order or worker count; see rng.hpp for the
// exact stream derivation.
struct SamplerSpec {
  StableParams params;
  std::uint64_t seed = 0;
};

// One-sided stable variate, Laplace transform exp(-lambda^{alpha_half}),
// via the Chambers-Mallows-Stuck/Kanter transform
//   A = (sin(s V) / sin(V)^{1/s}) * (sin((1-s) V) / W)^{(1-s)/s},
// V ~ U(0,pi), W ~ Exp(1), s = alpha_half.
double one_sided_from_uniforms(double alpha_half, double u1, double u2);

// count i.i.d. one-sided variates from the stream for (seed, path=stream, step=0, lane=0)
std::vector<double> sample_one_sided(double alpha_half, std::size_t count, std::uint64_t seed,
                                     std::uint64_t stream = 0);

// Increment of the driving noise over a window of length dt for (path, step):
// dt^{1/alpha} sqrt(2 A) G with A one-sided (alpha/2)-stable and G standard
// d-dimensional Gaussian; characteristic function exp(-dt |xi|^alpha).
std::vector<double> sample_increment(const SamplerSpec& spec, double dt, std::uint64_t path,
                                     std::uint64_t step);

// Batch version: `count` paths at the same step; row-major count x d.
std::vector<double> sample_increments(const SamplerSpec& spec, double dt, std::size_t count,
                                      std::uint64_t step);

// U_k, uniform on [kh, (k+1)h], drawn from lane 1 of the (path, step) stream;
// independent of the noise lane and drawn whether or not the variant uses it.
double sample_uniform_on_step(const SamplerSpec& spec, std::uint64_t path, std::uint64_t k,
                              double h);

}  // namespace sdelab
