#include "sdelab/stable_sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "sdelab/rng.hpp"

namespace sdelab {

namespace {
constexpr double kPi = 3.141592653589793238462643383279503;

void validate_alpha(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 2.0))
    throw std::domain_error("sample_increment: alpha must lie in (0, 2) for subordination");
}
}  // namespace

double one_sided_from_uniforms(double alpha_half, double u1, double u2) {
  if (!(alpha_half > 0.0) || !(alpha_half < 1.0))
    throw std::domain_error("sample_one_sided: alpha_half must lie in (0, 1)");
  double s = alpha_half;
  double v = kPi * u1;
  double w = -std::log(u2);
  double sv = std::sin(v);
  return std::sin(s * v) / std::pow(sv, 1.0 / s) *
         std::pow(std::sin((1.0 - s) * v) / w, (1.0 - s) / s);
}

std::vector<double> sample_one_sided(double alpha_half, std::size_t count, std::uint64_t seed,
                                     std::uint64_t stream) {
  std::vector<double> out(count);
  CounterStream cs(seed, stream, 0, 0);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = one_sided_from_uniforms(alpha_half, cs.uniform(2 * i), cs.uniform(2 * i + 1));
  return out;
}

std::vector<double> sample_increment(const SamplerSpec& spec, double dt, std::uint64_t path,
                                     std::uint64_t step) {
  validate_alpha(spec.params.alpha);
  if (!(dt > 0.0)) throw std::domain_error("sample_increment: dt must be > 0");
  int d = spec.params.dim;
  if (d < 1) throw std::domain_error("sample_increment: dim must be >= 1");
  CounterStream cs(spec.seed, path, step, 0);
  double a = one_sided_from_uniforms(0.5 * spec.params.alpha, cs.uniform(0), cs.uniform(1));
  double scale = std::pow(dt, 1.0 / spec.params.alpha) * std::sqrt(2.0 * a);
  std::vector<double> out(d);
  for (int i = 0; i < d; ++i) out[i] = scale * cs.gaussian(2 + i);
  return out;
}

std::vector<double> sample_increments(const SamplerSpec& spec, double dt, std::size_t count,
                                      std::uint64_t step) {
  int d = spec.params.dim;
  std::vector<double> out(count * static_cast<std::size_t>(d));
  for (std::size_t p = 0; p < count; ++p) {
    auto inc = sample_increment(spec, dt, p, step);
    for (int i = 0; i < d; ++i) out[p * d + i] = inc[i];
  }
  return out;
}

double sample_uniform_on_step(const SamplerSpec& spec, std::uint64_t path, std::uint64_t k,
                              double h) {
  if (!(h > 0.0)) throw std::domain_error("sample_uniform_on_step: h must be > 0");
  CounterStream cs(spec.seed, path, k, 1);
  return (static_cast<double>(k) + cs.uniform(0)) * h;
}

}  // namespace sdelab
