#include "sdelab/drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sdelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

}  // namespace

Drift::Drift(int dim, double p, double q, std::optional<double> norm_bound)
    : dim_(dim), p_(p), q_(q), norm_bound_(norm_bound) {
  if (dim < 1) throw std::invalid_argument("drift: dim must be >= 1");
  if (!(p >= 1.0)) throw std::invalid_argument("drift: p must lie in [1, inf]");
  if (!(q >= 1.0)) throw std::invalid_argument("drift: q must lie in [1, inf]");
}

std::vector<double> Drift::singular_direction(const std::vector<double>&) const {
  std::vector<double> e(dim_, 0.0);
  e[0] = 1.0;
  return e;
}

GapParams serrin_gap(double alpha, int dim, double p, double q) {
  if (!(alpha > 1.0 && alpha <= 2.0))
    throw std::domain_error("serrin_gap: alpha must lie in (1, 2]");
  if (dim < 1) throw std::invalid_argument("serrin_gap: dim must be >= 1");
  if (!(p >= 1.0) || !(q >= 1.0))
    throw std::invalid_argument("serrin_gap: exponents must lie in [1, inf]");
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  const double gamma = alpha - 1.0 - (dim * inv_p + alpha * inv_q);
  if (!(gamma > 0.0)) {
    std::ostringstream os;
    os << "supercritical drift: the Serrin condition d/p + alpha/q < alpha - 1 fails ("
       << dim * inv_p + alpha * inv_q << " >= " << alpha - 1.0 << " for alpha=" << alpha
       << ", d=" << dim << ", p=" << p << ", q=" << q << ")";
    throw std::domain_error(os.str());
  }
  return GapParams{alpha, dim, p, q, gamma};
}

CutoffVariant parse_variant(const std::string& name) {
  if (name == "none") return CutoffVariant::none;
  if (name == "standard") return CutoffVariant::standard;
  if (name == "bar") return CutoffVariant::bar;
  throw std::invalid_argument("unknown cutoff variant '" + name +
                              "' (expected none|standard|bar)");
}

std::string variant_name(CutoffVariant v) {
  switch (v) {
    case CutoffVariant::none: return "none";
    case CutoffVariant::standard: return "standard";
    case CutoffVariant::bar: return "bar";
  }
  return "?";
}

double cutoff_threshold(CutoffVariant v, double alpha, int dim, double p, double q, double h,
                        double B) {
  if (!(h > 0.0)) throw std::domain_error("cutoff_threshold: h must be positive");
  if (!(B > 0.0)) throw std::invalid_argument("cutoff_threshold: B must be positive");
  switch (v) {
    case CutoffVariant::none: return kInf;
    case CutoffVariant::standard: {
      const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
      const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
      if (inv_p == 0.0 && inv_q == 0.0) return kInf;  // b_h = b
      return B * std::pow(h, -(dim * inv_p / alpha + inv_q));
    }
    case CutoffVariant::bar: return B * std::pow(h, 1.0 / alpha - 1.0);
  }
  return kInf;
}

namespace {

class CutoffDrift final : public Drift {
 public:
  CutoffDrift(DriftPtr base, CutoffVariant variant, double threshold, double h)
      : Drift(base->dim(), base->p_exponent(), base->q_exponent(), base->norm_bound()),
        base_(std::move(base)),
        variant_(variant),
        threshold_(threshold),
        h_(h) {}

  std::vector<double> eval(double t, const std::vector<double>& x) const override {
    if (variant_ == CutoffVariant::bar && t < h_) return std::vector<double>(dim_, 0.0);
    if (base_->singular_at(x)) {
      auto dir = base_->singular_direction(x);
      for (double& c : dir) c *= threshold_;
      return dir;
    }
    auto v = base_->eval(t, x);
    const double m = norm2(v);
    if (m > threshold_) {
      const double s = threshold_ / m;
      for (double& c : v) c *= s;
    }
    return v;
  }

  bool singular_at(const std::vector<double>&) const override { return false; }

  bool time_dependent() const override {
    return base_->time_dependent() || variant_ == CutoffVariant::bar;
  }

  std::string describe() const override {
    std::ostringstream os;
    os << base_->describe() << " | cutoff(" << variant_name(variant_) << ", thr=" << threshold_
       << ")";
    return os.str();
  }

  const Drift& base() const { return *base_; }
  CutoffVariant variant() const { return variant_; }
  double step() const { return h_; }

 private:
  DriftPtr base_;
  CutoffVariant variant_;
  double threshold_;
  double h_;
};

class ConstantDrift final : public Drift {
 public:
  explicit ConstantDrift(std::vector<double> c, std::string label = "constant")
      : Drift(static_cast<int>(c.size()), kInf, kInf, norm2(c)),
        c_(std::move(c)),
        label_(std::move(label)) {}

  std::vector<double> eval(double, const std::vector<double>& x) const override {
    if (static_cast<int>(x.size()) != dim_)
      throw std::invalid_argument("drift eval: dimension mismatch");
    return c_;
  }
  bool time_dependent() const override { return false; }
  std::string describe() const override {
    std::ostringstream os;
    os << label_ << "(";
    for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? "," : "") << c_[i];
    os << ")";
    return os.str();
  }

 private:
  std::vector<double> c_;
  std::string label_;
};

class RadialDrift final : public Drift {
 public:
  RadialDrift(double c, double beta, double delta, double R, int dim, double p, double q)
      : Drift(dim, p, q), c_(c), beta_(beta), delta_(delta), R_(R) {}

  std::vector<double> eval(double t, const std::vector<double>& x) const override {
    if (static_cast<int>(x.size()) != dim_)
      throw std::invalid_argument("drift eval: dimension mismatch");
    const double r = norm2(x);
    if (r == 0.0)
      throw std::domain_error("radial drift: raw evaluation at the singular point x = 0");
    if (delta_ > 0.0 && !(t > 0.0))
      throw std::domain_error("radial drift: raw evaluation at t <= 0 with delta > 0");
    std::vector<double> v(dim_, 0.0);
    if (r > R_) return v;
    const double coef = c_ * (delta_ > 0.0 ? std::pow(t, -delta_) : 1.0) *
                        std::pow(r, -(beta_ + 1.0));
    for (int i = 0; i < dim_; ++i) v[i] = coef * x[i];
    return v;
  }

  bool singular_at(const std::vector<double>& x) const override { return norm2(x) == 0.0; }
  bool time_dependent() const override { return delta_ > 0.0; }

  std::string describe() const override {
    std::ostringstream os;
    os << "radial(c=" << c_ << ",beta=" << beta_ << ",delta=" << delta_ << ",R=" << R_
       << ",p=" << p_ << ",q=" << q_ << ")";
    return os.str();
  }

 private:
  double c_, beta_, delta_, R_;
};

class SmoothDrift final : public Drift {
 public:
  SmoothDrift(double c, int dim) : Drift(dim, kInf, kInf), c_(c) {}

  std::vector<double> eval(double, const std::vector<double>& x) const override {
    if (static_cast<int>(x.size()) != dim_)
      throw std::invalid_argument("drift eval: dimension mismatch");
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    const double w = c_ * std::exp(-r2);
    std::vector<double> v(dim_);
    for (int i = 0; i < dim_; ++i) v[i] = w * x[i];
    return v;
  }
  bool time_dependent() const override { return false; }
  std::string describe() const override {
    std::ostringstream os;
    os << "smooth(c=" << c_ << ")";
    return os.str();
  }

 private:
  double c_;
};

class TabulatedDrift final : public Drift {
 public:
  TabulatedDrift(std::vector<double> x, std::vector<double> value, double p, double q)
      : Drift(1, p, q), x_(std::move(x)), v_(std::move(value)) {
    if (x_.size() != v_.size() || x_.size() < 2)
      throw std::invalid_argument("tabulated drift: need >= 2 matching (x, value) nodes");
    if (!std::is_sorted(x_.begin(), x_.end(), std::less_equal<>()))
      throw std::invalid_argument("tabulated drift: x nodes must be strictly increasing");
  }

  std::vector<double> eval(double, const std::vector<double>& x) const override {
    if (x.size() != 1) throw std::invalid_argument("tabulated drift is one-dimensional");
    const double z = x[0];
    if (z <= x_.front() || z >= x_.back()) {
      // zero outside the table, continuous at the ends only if values are 0 there
      if (z == x_.front()) return {v_.front()};
      if (z == x_.back()) return {v_.back()};
      return {0.0};
    }
    const auto it = std::upper_bound(x_.begin(), x_.end(), z);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double w = (z - x_[i]) / (x_[i + 1] - x_[i]);
    return {(1.0 - w) * v_[i] + w * v_[i + 1]};
  }
  bool time_dependent() const override { return false; }
  std::string describe() const override {
    std::ostringstream os;
    os << "tabulated(n=" << x_.size() << ",range=[" << x_.front() << "," << x_.back()
       << "],p=" << p_ << ",q=" << q_ << ")";
    return os.str();
  }

 private:
  std::vector<double> x_, v_;
};

}  // namespace

DriftPtr cutoff_b_h(DriftPtr b, double alpha, double h, double B) {
  const double thr = cutoff_threshold(CutoffVariant::standard, alpha, b->dim(), b->p_exponent(),
                                      b->q_exponent(), h, B);
  if (std::isinf(thr)) return b;  // p = q = inf: identity
  return std::make_shared<CutoffDrift>(std::move(b), CutoffVariant::standard, thr, h);
}

DriftPtr cutoff_bbar_h(DriftPtr b, double alpha, double h, double B) {
  const double thr =
      cutoff_threshold(CutoffVariant::bar, alpha, b->dim(), b->p_exponent(), b->q_exponent(), h, B);
  return std::make_shared<CutoffDrift>(std::move(b), CutoffVariant::bar, thr, h);
}

DriftPtr apply_cutoff(CutoffVariant v, DriftPtr b, double alpha, double h, double B) {
  switch (v) {
    case CutoffVariant::none: return b;
    case CutoffVariant::standard: return cutoff_b_h(std::move(b), alpha, h, B);
    case CutoffVariant::bar: return cutoff_bbar_h(std::move(b), alpha, h, B);
  }
  return b;
}

DriftPtr builtin_singular_drift(const std::string& kind, double c, double beta, double delta,
                                double R, int dim, double p, double q) {
  if (dim < 1) throw std::invalid_argument("drift: dim must be >= 1");
  if (kind == "radial") {
    if (!(beta >= 0.0)) throw std::invalid_argument("radial drift: beta must be >= 0");
    if (!(delta >= 0.0 && delta < 1.0))
      throw std::invalid_argument("radial drift: delta must lie in [0, 1)");
    if (!(R > 0.0)) throw std::invalid_argument("radial drift: R must be positive");
    if (beta > 0.0 && !(beta * p < static_cast<double>(dim))) {
      std::ostringstream os;
      os << "radial drift: declared p inconsistent with beta (need beta*p < d; beta=" << beta
         << ", p=" << p << ", d=" << dim << ")";
      throw std::invalid_argument(os.str());
    }
    if (delta > 0.0 && !(delta * q < 1.0)) {
      std::ostringstream os;
      os << "radial drift: declared q inconsistent with delta (need delta*q < 1; delta=" << delta
         << ", q=" << q << ")";
      throw std::invalid_argument(os.str());
    }
    return std::make_shared<RadialDrift>(c, beta, delta, R, dim, p, q);
  }
  if (kind == "constant") {
    std::vector<double> v(dim, 0.0);
    v[0] = c;
    return std::make_shared<ConstantDrift>(std::move(v));
  }
  if (kind == "smooth") return std::make_shared<SmoothDrift>(c, dim);
  if (kind == "zero") return zero_drift(dim);
  throw std::invalid_argument("unknown drift kind '" + kind +
                              "' (expected radial|constant|smooth|zero)");
}

DriftPtr constant_drift(const std::vector<double>& c) {
  if (c.empty()) throw std::invalid_argument("constant drift: empty vector");
  return std::make_shared<ConstantDrift>(c);
}

DriftPtr zero_drift(int dim) {
  return std::make_shared<ConstantDrift>(std::vector<double>(dim, 0.0), "zero");
}

DriftPtr tabulated_drift(std::vector<double> x, std::vector<double> value, double p, double q) {
  return std::make_shared<TabulatedDrift>(std::move(x), std::move(value), p, q);
}

}  // namespace sdelab
