#include "sdelab/density_mc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sdelab/parallel.hpp"

namespace sdelab {

namespace {

constexpr double kRefFloor = 1e-12;

double quantile_sorted(const std::vector<double>& s, double q) {
  const double pos = q * static_cast<double>(s.size() - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= s.size()) return s.back();
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * s[i] + w * s[i + 1];
}

// reference p_alpha(t, y - x0) as a function of the lattice point; d=1 goes
// through the shared table, d=2 through a radial interpolation table built
// from direct quadrature
std::function<double(const std::array<double, 2>&)> reference_eval(const StableParams& params,
                                                                   double t,
                                                                   const std::array<double, 2>& x0,
                                                                   const Lattice& lat) {
  if (params.dim == 1) {
    auto table = StableKernelTable::get(params.alpha);
    const double c0 = x0[0];
    return [table, t, c0](const std::array<double, 2>& pt) { return table->p(t, pt[0] - c0); };
  }
  double rmax = 0.0;
  for (int a = 0; a < 2; ++a) {
    const double lo = std::abs(lat.low(a) - x0[a]);
    const double hi = std::abs(lat.high(a) - x0[a]);
    rmax = std::max({rmax, lo, hi});
  }
  rmax = std::hypot(rmax, rmax) + lat.spacing;
  const std::size_t n = 1024;
  auto radial = std::make_shared<std::vector<double>>(n);
  const double dr = rmax / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    KernelQuery q{t, {static_cast<double>(i) * dr, 0.0}};
    (*radial)[i] = density(params, q);
  }
  return [radial, dr, n, x0](const std::array<double, 2>& pt) {
    const double r = std::hypot(pt[0] - x0[0], pt[1] - x0[1]);
    double pos = r / dr;
    std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= n) i = n - 2;
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * (*radial)[i] + w * (*radial)[i + 1];
  };
}

}  // namespace

double default_half_width(double alpha, double t) { return 8.0 * std::pow(t, 1.0 / alpha); }

double default_bandwidth(const MarginalSample& samples, const Lattice& lattice, double alpha,
                         double step) {
  if (samples.count < 2) throw std::invalid_argument("bandwidth: need at least 2 samples");
  double sigma = std::numeric_limits<double>::infinity();
  std::vector<double> col(samples.count);
  for (int a = 0; a < samples.dim; ++a) {
    for (std::size_t i = 0; i < samples.count; ++i) col[i] = samples.row(i)[a];
    std::sort(col.begin(), col.end());
    const double iqr = quantile_sorted(col, 0.75) - quantile_sorted(col, 0.25);
    sigma = std::min(sigma, iqr / 1.349);
  }
  double bw = 1.06 * sigma * std::pow(static_cast<double>(samples.count), -0.2);
  const double lo = std::pow(step, 1.0 / alpha) / 4.0;
  const double hi = (lattice.high(0) - lattice.low(0)) / 8.0;
  return std::clamp(bw, std::min(lo, hi), hi);
}

DensityGrid kde_estimate(const MarginalSample& samples, const Lattice& lattice, double bandwidth,
                         int workers) {
  lattice.validate();
  if (samples.count == 0) throw std::invalid_argument("kde: empty sample");
  if (samples.count < 100) throw std::invalid_argument("kde: need at least 100 samples");
  if (samples.dim != lattice.dim) throw std::invalid_argument("kde: dimension mismatch");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("kde: bandwidth must be positive");

  const std::size_t n = lattice.size();
  const double inv_n = 1.0 / static_cast<double>(samples.count);
  const double inv_bw = 1.0 / bandwidth;
  const double norm1 = inv_bw / std::sqrt(2.0 * M_PI);
  const double band = 8.0 * bandwidth;  // kernel support cut; mass loss ~1e-15

  DensityGrid grid;
  grid.lattice = lattice;
  grid.time = samples.time;
  grid.bandwidth = bandwidth;
  grid.values.assign(n, 0.0);

  // parallel over lattice points: each value is a full fixed-order sample
  // sum, so the result is identical for any worker count
  parallel_for(
      n,
      [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
          const auto pt = lattice.point(idx);
          double acc = 0.0;
          if (lattice.dim == 1) {
            for (std::size_t j = 0; j < samples.count; ++j) {
              const double dx = pt[0] - samples.data[j];
              if (std::abs(dx) > band) continue;
              const double u = dx * inv_bw;
              acc += std::exp(-0.5 * u * u);
            }
            grid.values[idx] = acc * inv_n * norm1;
          } else {
            for (std::size_t j = 0; j < samples.count; ++j) {
              const double dx = pt[0] - samples.data[2 * j];
              const double dy = pt[1] - samples.data[2 * j + 1];
              if (std::abs(dx) > band || std::abs(dy) > band) continue;
              const double u = (dx * dx + dy * dy) * inv_bw * inv_bw;
              acc += std::exp(-0.5 * u);
            }
            grid.values[idx] = acc * inv_n * norm1 * norm1;
          }
        }
      },
      workers);

  grid.recompute_mass();

  // analytic mass of each sample's kernel outside the window
  const double s2 = bandwidth * std::sqrt(2.0);
  double tail = 0.0;
  for (std::size_t j = 0; j < samples.count; ++j) {
    double inside = 1.0;
    for (int a = 0; a < lattice.dim; ++a) {
      const double x = samples.data[j * static_cast<std::size_t>(lattice.dim) + a];
      inside *= 0.5 * (std::erf((lattice.high(a) - x) / s2) - std::erf((lattice.low(a) - x) / s2));
    }
    tail += 1.0 - inside;
  }
  grid.tail_mass = tail * inv_n;
  return grid;
}

RatioStat heat_kernel_ratio(const DensityGrid& grid, const StableParams& reference,
                            const std::array<double, 2>& x0) {
  grid.lattice.validate();
  if (!(grid.time > 0.0)) throw std::domain_error("heat_kernel_ratio: grid time must be positive");
  if (reference.dim != grid.lattice.dim)
    throw std::invalid_argument("heat_kernel_ratio: dimension mismatch");
  const auto ref = reference_eval(reference, grid.time, x0, grid.lattice);

  RatioStat stat;
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    const auto pt = grid.lattice.point(i);
    const double p = ref(pt);
    if (p < kRefFloor) {
      ++stat.excluded;
      continue;
    }
    ++stat.considered;
    const double r = grid.values[i] / p;
    if (r > stat.value) {
      stat.value = r;
      stat.at = pt;
    }
  }
  if (stat.considered == 0) throw std::domain_error("heat_kernel_ratio: all points underflowed");
  return stat;
}

PairStat holder_space_statistic(const DensityGrid& grid, const StableParams& reference,
                                const std::array<double, 2>& x0, double gamma) {
  grid.lattice.validate();
  if (!(grid.time > 0.0))
    throw std::domain_error("holder_space_statistic: grid time must be positive");
  if (!(gamma > 0.0)) throw std::invalid_argument("holder_space_statistic: gamma must be positive");
  if (reference.dim != grid.lattice.dim)
    throw std::invalid_argument("holder_space_statistic: dimension mismatch");

  const auto ref = reference_eval(reference, grid.time, x0, grid.lattice);
  const double tpow = std::pow(grid.time, gamma / reference.alpha);

  const std::size_t n = grid.values.size();
  const std::size_t stride = std::max<std::size_t>(1, n / 512);
  std::vector<std::size_t> pts;
  for (std::size_t i = 0; i < n; i += stride) pts.push_back(i);

  std::vector<double> refv(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) refv[k] = ref(grid.lattice.point(pts[k]));

  PairStat stat;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    const auto pa = grid.lattice.point(pts[a]);
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      const auto pb = grid.lattice.point(pts[b]);
      const double psum = refv[a] + refv[b];
      if (psum < 2.0 * kRefFloor) {
        ++stat.excluded;
        continue;
      }
      ++stat.considered;
      const double dist = std::hypot(pa[0] - pb[0], pa[1] - pb[1]);
      const double shape = std::min(std::pow(dist, gamma), tpow) / tpow * psum;
      const double r = std::abs(grid.values[pts[a]] - grid.values[pts[b]]) / shape;
      if (r > stat.value) {
        stat.value = r;
        stat.at_a = pa;
        stat.at_b = pb;
      }
    }
  }
  return stat;
}

}  // namespace sdelab
