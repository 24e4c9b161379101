#pragma once

#include <memory>
#include <vector>

namespace sdelab {

// Isotropic alpha-stable law, characteristic function exp(-t|xi|^alpha).
// alpha in (1,2) for SDE use; alpha in {1,2} accepted here as closed-form
// oracle cases (Cauchy / Gaussian). Density evaluation supports dim in {1,2};
// sampling (stable_sampler) supports any dim.
struct StableParams {
  double alpha = 1.5;
  int dim = 1;
};

struct KernelQuery {
  double time = 1.0;
  std::vector<double> point;
};

// Quadrature knobs for the Fourier/Hankel inversion: the integral is
// truncated where exp(-t u^alpha) < tail_tol, panels are at most pi/(2|z|)
// wide, and each panel is bisected until the embedded error estimate is
// below its share of abs_tol.
struct QuadratureControl {
  double tail_tol = 1e-16;
  double abs_tol = 1e-11;
  int max_depth = 10;
};

// alpha in (0,2], dim >= 1; throws std::domain_error otherwise
void validate(const StableParams& params);

double proxy_normalizer(double alpha, int dim);
double proxy_density(const StableParams& params, const KernelQuery& q);
double density(const StableParams& params, const KernelQuery& q,
               const QuadratureControl& ctl = {});
std::vector<double> grad_density(const StableParams& params, const KernelQuery& q,
                                 const QuadratureControl& ctl = {});

struct RatioExtremes {
  double min_ratio;
  double max_ratio;
};
RatioExtremes aronson_ratio(const StableParams& params, const std::vector<KernelQuery>& grid,
                            const QuadratureControl& ctl = {});

// d=1 only: max over grid points y of
// |int p(s, w) p(t, y-w) dw - p(s+t, y)|.
double semigroup_residual(const StableParams& params, double s, double t,
                          const std::vector<double>& grid);

// d=1 distribution function P(Z_t <= x), via the sine inversion integral.
double cdf(const StableParams& params, double t, double x, const QuadratureControl& ctl = {});

// Tabulated unit-time kernel for d=1 hot paths (Duhamel solvers, lemma
// sweeps, KS tests). Values are pinned to the same inversion quadrature as
// density(); interpolation is 4-point Lagrange on an asinh-spaced grid with a
// convergent tail series beyond u = 64. Scale covariance supplies all t:
//   p(t,w)  = t^{-1/a} p1(w t^{-1/a})
//   dp(t,w) = t^{-2/a} p1'(w t^{-1/a})
class StableKernelTable {
 public:
  // process-wide cache; thread-safe
  static std::shared_ptr<const StableKernelTable> get(double alpha);

  double alpha() const { return alpha_; }
  double p1(double u) const;    // unit-time density at |u|
  double dp1(double u) const;   // signed d/du of p1 (odd extension)
  double cdf1(double x) const;  // unit-time CDF
  double p(double t, double w) const;
  double dp(double t, double w) const;
  double cdf(double t, double x) const;

 private:
  explicit StableKernelTable(double alpha);
  double interp(const std::vector<double>& tab, double u) const;

  double alpha_;
  double dv_;
  double vmax_;
  std::vector<double> ptab_, dptab_, ctab_;
};

}  // namespace sdelab
