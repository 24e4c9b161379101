#include "sdelab/euler.hpp"

#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "sdelab/parallel.hpp"
#include "sdelab/stable_sampler.hpp"

namespace sdelab {

namespace {

void fnv_mix(std::uint64_t& state, const void* bytes, std::size_t n) {
  const unsigned char* b = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < n; ++i) {
    state ^= b[i];
    state *= 0x100000001b3ull;
  }
}

void fnv_mix(std::uint64_t& state, double v) { fnv_mix(state, &v, sizeof v); }
void fnv_mix(std::uint64_t& state, std::uint64_t v) { fnv_mix(state, &v, sizeof v); }

std::vector<double> start_point(const SchemeConfig& cfg) {
  if (cfg.x0.empty()) return std::vector<double>(cfg.params.dim, 0.0);
  return cfg.x0;
}

// K = floor(t/h) with grid snapping: t within one part in 1e9 of a grid time
// counts as that grid time so that marginals at k*h match the pure chain.
std::uint64_t split_time(double t, double h, std::uint64_t n, double& tau) {
  double kd = std::floor(t / h + 1e-9);
  std::uint64_t K = kd < 0.0 ? 0 : static_cast<std::uint64_t>(kd);
  if (K > n) K = n;
  tau = t - static_cast<double>(K) * h;
  if (tau <= 1e-12 * h) tau = 0.0;
  return K;
}

}  // namespace

void validate(const SchemeConfig& cfg) {
  validate(cfg.params);
  if (!(cfg.horizon > 0.0)) throw std::domain_error("scheme: horizon T must be positive");
  if (cfg.steps == 0) throw std::invalid_argument("scheme: need at least one step");
  if (!(cfg.cutoff_B > 0.0)) throw std::invalid_argument("scheme: cutoff constant B must be positive");
  if (!cfg.x0.empty() && static_cast<int>(cfg.x0.size()) != cfg.params.dim)
    throw std::invalid_argument("scheme: x0 dimension mismatch");
}

std::uint64_t config_hash(const SchemeConfig& cfg, const Drift& drift) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  fnv_mix(h, cfg.params.alpha);
  fnv_mix(h, static_cast<std::uint64_t>(cfg.params.dim));
  fnv_mix(h, cfg.horizon);
  fnv_mix(h, cfg.steps);
  fnv_mix(h, static_cast<std::uint64_t>(cfg.variant));
  fnv_mix(h, cfg.cutoff_B);
  for (double c : cfg.x0) fnv_mix(h, c);
  fnv_mix(h, cfg.seed);
  const std::string d = drift.describe();
  fnv_mix(h, d.data(), d.size());
  return h;
}

void euler_step(std::vector<double>& x, std::uint64_t k, const SchemeConfig& cfg,
                const Drift& cutoff_drift, std::uint64_t path) {
  const double h = cfg.step_size();
  const SamplerSpec spec{cfg.params, cfg.seed};
  const std::vector<double> dz = sample_increment(spec, h, path, k);
  const double u = sample_uniform_on_step(spec, path, k, h);
  const std::vector<double> b = cutoff_drift.eval(u, x);
  for (int i = 0; i < cfg.params.dim; ++i) x[i] += dz[i] + h * b[i];
}

MarginalSample simulate_marginal(const SchemeConfig& cfg, const DriftPtr& drift, double t,
                                 std::size_t count) {
  validate(cfg);
  if (drift->dim() != cfg.params.dim)
    throw std::invalid_argument("simulate_marginal: drift dimension mismatch");
  if (!(t >= 0.0 && t <= cfg.horizon))
    throw std::domain_error("simulate_marginal: t must lie in [0, T]");

  const double h = cfg.step_size();
  const int d = cfg.params.dim;
  const DriftPtr cut = apply_cutoff(cfg.variant, drift, cfg.params.alpha, h, cfg.cutoff_B);
  const SamplerSpec spec{cfg.params, cfg.seed};
  const std::vector<double> x0 = start_point(cfg);

  double tau = 0.0;
  const std::uint64_t K = split_time(t, h, cfg.steps, tau);

  MarginalSample out;
  out.time = t;
  out.count = count;
  out.dim = d;
  out.data.assign(count * static_cast<std::size_t>(d), 0.0);
  out.seed = cfg.seed;
  out.config = config_hash(cfg, *drift);

  parallel_for(
      count,
      [&](std::size_t lo, std::size_t hi) {
        std::vector<double> x(d);
        for (std::size_t path = lo; path < hi; ++path) {
          x = x0;
          for (std::uint64_t k = 0; k < K; ++k) euler_step(x, k, cfg, *cut, path);
          if (tau > 0.0) {
            const std::vector<double> dz = sample_increment(spec, tau, path, K);
            const double u = sample_uniform_on_step(spec, path, K, h);
            const std::vector<double> b = cut->eval(u, x);
            for (int i = 0; i < d; ++i) x[i] += dz[i] + tau * b[i];
          }
          std::memcpy(out.data.data() + path * static_cast<std::size_t>(d), x.data(),
                      sizeof(double) * static_cast<std::size_t>(d));
        }
      },
      cfg.workers);
  return out;
}

PathSet simulate_paths(const SchemeConfig& cfg, const DriftPtr& drift, std::size_t count,
                       std::size_t memory_budget) {
  validate(cfg);
  if (drift->dim() != cfg.params.dim)
    throw std::invalid_argument("simulate_paths: drift dimension mismatch");

  const double h = cfg.step_size();
  const int d = cfg.params.dim;
  const std::size_t n1 = static_cast<std::size_t>(cfg.steps) + 1;
  const std::size_t doubles = count * n1 * static_cast<std::size_t>(d);
  if (doubles > memory_budget / sizeof(double)) {
    std::ostringstream os;
    os << "simulate_paths: " << count << " paths x " << n1 << " grid times x " << d
       << " components = " << doubles * sizeof(double)
       << " bytes exceeds the memory budget of " << memory_budget
       << "; stream marginals via simulate_marginal or raise the budget";
    throw std::length_error(os.str());
  }

  const DriftPtr cut = apply_cutoff(cfg.variant, drift, cfg.params.alpha, h, cfg.cutoff_B);
  const std::vector<double> x0 = start_point(cfg);

  PathSet out;
  out.times.resize(n1);
  for (std::size_t k = 0; k < n1; ++k) out.times[k] = static_cast<double>(k) * h;
  out.count = count;
  out.dim = d;
  out.data.assign(doubles, 0.0);
  out.seed = cfg.seed;
  out.config = config_hash(cfg, *drift);

  parallel_for(
      count,
      [&](std::size_t lo, std::size_t hi) {
        std::vector<double> x(d);
        for (std::size_t path = lo; path < hi; ++path) {
          x = x0;
          double* row = out.data.data() + path * n1 * static_cast<std::size_t>(d);
          std::memcpy(row, x.data(), sizeof(double) * static_cast<std::size_t>(d));
          for (std::uint64_t k = 0; k < cfg.steps; ++k) {
            euler_step(x, k, cfg, *cut, path);
            std::memcpy(row + (k + 1) * static_cast<std::size_t>(d), x.data(),
                        sizeof(double) * static_cast<std::size_t>(d));
          }
        }
      },
      cfg.workers);
  return out;
}

}  // namespace sdelab
