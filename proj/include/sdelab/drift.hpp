#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sdelab {

// L^q-L^p drift field b(t, x). Raw evaluation may be unbounded near a
// declared singular set; the scheme and the deterministic solvers always go
// through a cutoff wrapper, which is total. Exponents p, q live in [1, inf]
// with infinity encoded as std::numeric_limits<double>::infinity().
class Drift {
 public:
  virtual ~Drift() = default;

  // raw field; throws std::domain_error at singular points
  virtual std::vector<double> eval(double t, const std::vector<double>& x) const = 0;
  virtual bool singular_at(const std::vector<double>& x) const { return false; }
  // canonical direction reported by the cutoff field at a singular point
  virtual std::vector<double> singular_direction(const std::vector<double>& x) const;

  virtual bool time_dependent() const = 0;
  virtual std::string describe() const = 0;

  int dim() const { return dim_; }
  double p_exponent() const { return p_; }
  double q_exponent() const { return q_; }
  std::optional<double> norm_bound() const { return norm_bound_; }

 protected:
  Drift(int dim, double p, double q, std::optional<double> norm_bound = std::nullopt);

  int dim_;
  double p_, q_;
  std::optional<double> norm_bound_;
};

using DriftPtr = std::shared_ptr<const Drift>;

struct GapParams {
  double alpha;
  int dim;
  double p;
  double q;
  double gamma;
};

// gamma = alpha - 1 - (d/p + alpha/q), with 1/inf = 0; throws
// std::domain_error when the Serrin condition fails (gamma <= 0).
GapParams serrin_gap(double alpha, int dim, double p, double q);

// Cutoff operators. `standard` clips |b| at B h^{-d/(alpha p) - 1/q} and is
// the identity when p = q = inf; `bar` clips at B h^{1/alpha - 1} and zeroes
// the field for t < h. `none` is the identity.
enum class CutoffVariant { none, standard, bar };

CutoffVariant parse_variant(const std::string& name);
std::string variant_name(CutoffVariant v);

// +infinity signals "no clipping"
double cutoff_threshold(CutoffVariant v, double alpha, int dim, double p, double q, double h,
                        double B);

DriftPtr cutoff_b_h(DriftPtr b, double alpha, double h, double B);
DriftPtr cutoff_bbar_h(DriftPtr b, double alpha, double h, double B);
DriftPtr apply_cutoff(CutoffVariant v, DriftPtr b, double alpha, double h, double B);

// Built-in drift kinds:
//   "radial"   b(t,x) = c t^{-delta} x/|x|^{beta+1} 1{0<|x|<=R}; declared p
//              must satisfy beta p < d and q must satisfy delta q < 1
//   "constant" b = c e_1 (time-independent, p = q = inf)
//   "smooth"   b(t,x) = c x exp(-|x|^2) (bounded smooth, p = q = inf)
//   "zero"
// p/q default to inf where a kind admits it.
DriftPtr builtin_singular_drift(const std::string& kind, double c, double beta, double delta,
                                double R, int dim, double p, double q);

DriftPtr constant_drift(const std::vector<double>& c);
DriftPtr zero_drift(int dim);

// 1-d tabulated field from (x, value) nodes, linear interpolation, zero
// outside the node range; declared exponents supplied by the caller.
DriftPtr tabulated_drift(std::vector<double> x, std::vector<double> value, double p, double q);

}  // namespace sdelab
