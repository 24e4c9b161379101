#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdelab/drift.hpp"
#include "sdelab/stable_kernel.hpp"

namespace sdelab {

// Euler scheme with step h = T/n:
//   X_{k+1} = X_k + (Z_{(k+1)h} - Z_{kh}) + h * b_h(U_k, X_k),
// where U_k is uniform on [kh, (k+1)h] and b_h is the cutoff drift selected
// by `variant`. A marginal at off-grid t uses a partial step of length
// t - Kh (K = floor(t/h)) with the same U_K and the correspondingly scaled
// noise; grid times reproduce the pure n-step chain bit for bit.
struct SchemeConfig {
  StableParams params{1.5, 1};
  double horizon = 1.0;   // T
  std::uint64_t steps = 100;  // n
  CutoffVariant variant = CutoffVariant::standard;
  double cutoff_B = 1.0;
  std::vector<double> x0;  // defaults to the origin
  std::uint64_t seed = 0;
  int workers = 0;  // 0: SDELAB_WORKERS or hardware concurrency

  double step_size() const { return horizon / static_cast<double>(steps); }
};

void validate(const SchemeConfig& cfg);

// FNV-1a over the scheme-defining fields; stamped into outputs
std::uint64_t config_hash(const SchemeConfig& cfg, const Drift& drift);

// Single path advanced in place through step k (uses streams (path, k)).
// `drift` is the raw field; the cutoff is applied internally.
void euler_step(std::vector<double>& x, std::uint64_t k, const SchemeConfig& cfg,
                const Drift& cutoff_drift, std::uint64_t path);

struct MarginalSample {
  double time = 0.0;
  std::size_t count = 0;
  int dim = 1;
  std::vector<double> data;  // count x dim, row-major
  std::uint64_t seed = 0;
  std::uint64_t config = 0;  // config_hash of the run

  const double* row(std::size_t i) const { return data.data() + i * dim; }
};

MarginalSample simulate_marginal(const SchemeConfig& cfg, const DriftPtr& drift, double t,
                                 std::size_t count);

struct PathSet {
  std::vector<double> times;  // n+1 grid times
  std::size_t count = 0;
  int dim = 1;
  std::vector<double> data;  // count x (n+1) x dim, row-major
  std::uint64_t seed = 0;
  std::uint64_t config = 0;

  const double* at(std::size_t path, std::size_t k) const {
    return data.data() + (path * times.size() + k) * dim;
  }
};

// Full grid trajectories; memory budget (bytes) guards against accidental
// huge allocations -- exceeding it is an error advising marginal streaming.
PathSet simulate_paths(const SchemeConfig& cfg, const DriftPtr& drift, std::size_t count,
                       std::size_t memory_budget = std::size_t(1) << 32);

}  // namespace sdelab
