#include "sdelab/stable_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "sdelab/quadrature.hpp"

namespace sdelab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

void validate(const StableParams& params, double time, int max_dim) {
  if (!(params.alpha > 0.0) || params.alpha > 2.0)
    throw std::domain_error("stable_kernel: alpha must lie in (0, 2]");
  if (params.dim < 1) throw std::domain_error("stable_kernel: dim must be >= 1");
  if (params.dim > max_dim)
    throw std::invalid_argument("stable_kernel: density evaluation supports dim in {1, 2}");
  if (!(time > 0.0)) throw std::domain_error("stable_kernel: time must be > 0");
}

}  // namespace

void validate(const StableParams& params) {
  if (!(params.alpha > 0.0) || params.alpha > 2.0)
    throw std::domain_error("stable_kernel: alpha must lie in (0, 2]");
  if (params.dim < 1) throw std::domain_error("stable_kernel: dim must be >= 1");
}

namespace {

double radius(const KernelQuery& q, int dim) {
  if (static_cast<int>(q.point.size()) != dim)
    throw std::invalid_argument("stable_kernel: query point has wrong dimension");
  double s = 0.0;
  for (double c : q.point) s += c * c;
  return std::sqrt(s);
}

// truncation point: exp(-t u^alpha) < tail_tol beyond it
double u_max(double alpha, double t, double tail_tol) {
  return std::pow(-std::log(tail_tol) / t, 1.0 / alpha);
}

double osc_panel_width(double umax, double r) {
  double w = umax / 8.0;
  if (r > 0.0) w = std::min(w, kPi / (2.0 * r));
  return w;
}

}  // namespace

double proxy_normalizer(double alpha, int dim) {
  if (!(alpha > 0.0) || alpha > 2.0)
    throw std::domain_error("proxy_normalizer: alpha must lie in (0, 2]");
  if (dim < 1) throw std::domain_error("proxy_normalizer: dim must be >= 1");
  // 1 / int (1+|y|)^{-(d+a)} dy = Gamma(d+a) / (omega_{d-1} Gamma(d) Gamma(a))
  double d = static_cast<double>(dim);
  double omega = 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
  return std::tgamma(d + alpha) / (omega * std::tgamma(d) * std::tgamma(alpha));
}

double proxy_density(const StableParams& params, const KernelQuery& q) {
  validate(params, q.time, 8);
  double r = radius(q, params.dim);
  double d = static_cast<double>(params.dim);
  double a = params.alpha;
  double scale = std::pow(q.time, 1.0 / a);
  double c = proxy_normalizer(a, params.dim);
  return c * std::pow(q.time, -d / a) * std::pow(1.0 + r / scale, -(d + a));
}

double density(const StableParams& params, const KernelQuery& q, const QuadratureControl& ctl) {
  validate(params, q.time, 2);
  double a = params.alpha, t = q.time;
  double r = radius(q, params.dim);
  double umax = u_max(a, t, ctl.tail_tol);
  double w = osc_panel_width(umax, r);
  if (params.dim == 1) {
    auto f = [&](double u) { return std::exp(-t * std::pow(u, a)) * std::cos(u * r); };
    double v = integrate_panels(f, 0.0, umax, w, ctl.abs_tol, ctl.max_depth) / kPi;
    return std::max(v, 0.0);
  }
  auto f = [&](double u) {
    return std::exp(-t * std::pow(u, a)) * std::cyl_bessel_j(0, u * r) * u;
  };
  double v = integrate_panels(f, 0.0, umax, w, ctl.abs_tol, ctl.max_depth) / (2.0 * kPi);
  return std::max(v, 0.0);
}

std::vector<double> grad_density(const StableParams& params, const KernelQuery& q,
                                 const QuadratureControl& ctl) {
  validate(params, q.time, 2);
  double a = params.alpha, t = q.time;
  double r = radius(q, params.dim);
  double umax = u_max(a, t, ctl.tail_tol);
  double w = osc_panel_width(umax, r);
  if (params.dim == 1) {
    double z = q.point[0];
    auto f = [&](double u) { return u * std::exp(-t * std::pow(u, a)) * std::sin(u * r); };
    double v = -integrate_panels(f, 0.0, umax, w, ctl.abs_tol, ctl.max_depth) / kPi;
    return {z >= 0.0 ? v : -v};
  }
  if (r == 0.0) return {0.0, 0.0};
  auto f = [&](double u) {
    return u * u * std::exp(-t * std::pow(u, a)) * std::cyl_bessel_j(1, u * r);
  };
  double dpdr = -integrate_panels(f, 0.0, umax, w, ctl.abs_tol, ctl.max_depth) / (2.0 * kPi);
  return {q.point[0] / r * dpdr, q.point[1] / r * dpdr};
}

RatioExtremes aronson_ratio(const StableParams& params, const std::vector<KernelQuery>& grid,
                            const QuadratureControl& ctl) {
  if (grid.empty()) throw std::invalid_argument("aronson_ratio: empty grid");
  RatioExtremes ex{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& q : grid) {
    double ratio = density(params, q, ctl) / proxy_density(params, q);
    ex.min_ratio = std::min(ex.min_ratio, ratio);
    ex.max_ratio = std::max(ex.max_ratio, ratio);
  }
  return ex;
}

double semigroup_residual(const StableParams& params, double s, double t,
                          const std::vector<double>& grid) {
  if (params.dim != 1) throw std::invalid_argument("semigroup_residual: d=1 only");
  if (!(s > 0.0) || !(t > 0.0)) throw std::domain_error("semigroup_residual: s, t must be > 0");
  if (grid.empty()) throw std::invalid_argument("semigroup_residual: empty grid");
  auto tab = StableKernelTable::get(params.alpha);
  double worst = 0.0;
  for (double y : grid) {
    double L = std::max({30.0 * (std::pow(s, 1.0 / params.alpha) + std::pow(t, 1.0 / params.alpha)),
                         3.0 * std::abs(y), 10.0});
    auto f = [&](double w) { return tab->p(s, w) * tab->p(t, y - w); };
    double width = std::min(std::pow(std::min(s, t), 1.0 / params.alpha), L / 8.0);
    double conv = integrate_panels(f, -L, L, width, 1e-11, 12);
    worst = std::max(worst, std::abs(conv - tab->p(s + t, y)));
  }
  return worst;
}

double cdf(const StableParams& params, double t, double x, const QuadratureControl& ctl) {
  validate(params, t, 1);
  if (params.dim != 1) throw std::invalid_argument("cdf: d=1 only");
  double a = params.alpha;
  double ax = std::abs(x);
  double umax = u_max(a, t, ctl.tail_tol);
  double w = osc_panel_width(umax, ax);
  auto f = [&](double u) {
    return u > 0.0 ? std::exp(-t * std::pow(u, a)) * std::sin(u * ax) / u : ax;
  };
  double v = 0.5 + integrate_panels(f, 0.0, umax, w, ctl.abs_tol, ctl.max_depth) / kPi;
  v = std::clamp(v, 0.5, 1.0);
  return x >= 0.0 ? v : 1.0 - v;
}

// ---------------------------------------------------------------------------
// StableKernelTable

namespace {
constexpr double kTableUMax = 64.0;
constexpr int kTableNodes = 4096;
constexpr int kTailTerms = 5;

// convergent-for-practical-u expansion of the unit-time 1-d density:
// p1(u) = (1/pi) sum_k (-1)^{k+1} Gamma(k a + 1)/k! sin(k pi a/2) u^{-k a - 1}
double tail_p1(double alpha, double u) {
  double s = 0.0, fact = 1.0;
  for (int k = 1; k <= kTailTerms; ++k) {
    fact *= k;
    double term = std::tgamma(k * alpha + 1.0) / fact * std::sin(0.5 * k * kPi * alpha) *
                  std::pow(u, -k * alpha - 1.0);
    s += (k % 2 == 1) ? term : -term;
  }
  return s / kPi;
}

double tail_dp1(double alpha, double u) {
  double s = 0.0, fact = 1.0;
  for (int k = 1; k <= kTailTerms; ++k) {
    fact *= k;
    double term = std::tgamma(k * alpha + 1.0) / fact * std::sin(0.5 * k * kPi * alpha) *
                  -(k * alpha + 1.0) * std::pow(u, -k * alpha - 2.0);
    s += (k % 2 == 1) ? term : -term;
  }
  return s / kPi;
}

double tail_survival(double alpha, double u) {
  double s = 0.0, fact = 1.0;
  for (int k = 1; k <= kTailTerms; ++k) {
    fact *= k;
    double term = std::tgamma(k * alpha) / fact * std::sin(0.5 * k * kPi * alpha) *
                  std::pow(u, -k * alpha);
    s += (k % 2 == 1) ? term : -term;
  }
  return s / kPi;
}
}  // namespace

StableKernelTable::StableKernelTable(double alpha) : alpha_(alpha) {
  vmax_ = std::asinh(kTableUMax);
  dv_ = vmax_ / static_cast<double>(kTableNodes - 1);
  ptab_.resize(kTableNodes);
  dptab_.resize(kTableNodes);
  ctab_.resize(kTableNodes);
  StableParams params{alpha, 1};
  QuadratureControl ctl;
  for (int i = 0; i < kTableNodes; ++i) {
    double u = std::sinh(dv_ * i);
    KernelQuery q{1.0, {u}};
    ptab_[i] = density(params, q, ctl);
    dptab_[i] = grad_density(params, q, ctl)[0];
    ctab_[i] = sdelab::cdf(params, 1.0, u, ctl);
  }
}

std::shared_ptr<const StableKernelTable> StableKernelTable::get(double alpha) {
  static std::mutex mu;
  static std::map<long long, std::shared_ptr<const StableKernelTable>> cache;
  long long key = std::llround(alpha * 1e12);
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto tab = std::shared_ptr<const StableKernelTable>(new StableKernelTable(alpha));
  cache[key] = tab;
  return tab;
}

double StableKernelTable::interp(const std::vector<double>& tab, double u) const {
  double v = std::asinh(u);
  double s = v / dv_;
  int k = static_cast<int>(s);
  k = std::clamp(k, 1, kTableNodes - 3);
  double x = s - k;  // in [0,1) when clamp inactive
  // 4-point Lagrange on nodes k-1..k+2 (uniform spacing in v)
  double xm1 = x + 1.0, xp1 = x - 1.0, xp2 = x - 2.0;
  double c0 = -x * xp1 * xp2 / 6.0;
  double c1 = xm1 * xp1 * xp2 / 2.0;
  double c2 = -xm1 * x * xp2 / 2.0;
  double c3 = xm1 * x * xp1 / 6.0;
  return c0 * tab[k - 1] + c1 * tab[k] + c2 * tab[k + 1] + c3 * tab[k + 2];
}

double StableKernelTable::p1(double u) const {
  u = std::abs(u);
  if (u >= kTableUMax) return tail_p1(alpha_, u);
  return std::max(interp(ptab_, u), 0.0);
}

double StableKernelTable::dp1(double u) const {
  double au = std::abs(u);
  double v = au >= kTableUMax ? tail_dp1(alpha_, au) : interp(dptab_, au);
  return u >= 0.0 ? v : -v;
}

double StableKernelTable::cdf1(double x) const {
  double ax = std::abs(x);
  double v = ax >= kTableUMax ? 1.0 - tail_survival(alpha_, ax)
                              : std::clamp(interp(ctab_, ax), 0.5, 1.0);
  return x >= 0.0 ? v : 1.0 - v;
}

double StableKernelTable::p(double t, double w) const {
  double s = std::pow(t, -1.0 / alpha_);
  return s * p1(w * s);
}

double StableKernelTable::dp(double t, double w) const {
  double s = std::pow(t, -1.0 / alpha_);
  return s * s * dp1(w * s);
}

double StableKernelTable::cdf(double t, double x) const {
  return cdf1(x * std::pow(t, -1.0 / alpha_));
}

}  // namespace sdelab
