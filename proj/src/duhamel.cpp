#include "sdelab/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "sdelab/parallel.hpp"
#include "sdelab/rng.hpp"
#include "sdelab/stable_sampler.hpp"

namespace sdelab {

namespace {

struct PaddedAxis {
  std::vector<double> z;   // node coordinates
  double dz = 0.0;
  std::size_t offset = 0;  // index of the first window node
  std::size_t n = 0;
};

PaddedAxis pad_window(const Lattice& window, double lo_target, double hi_target) {
  window.validate();
  if (window.dim != 1)
    throw std::invalid_argument("duhamel: deterministic solvers are one-dimensional");
  PaddedAxis p;
  p.dz = window.spacing;
  const double lo = window.low(0), hi = window.high(0);
  const std::size_t pad_lo =
      lo > lo_target ? static_cast<std::size_t>(std::ceil((lo - lo_target) / p.dz - 1e-9)) : 0;
  const std::size_t pad_hi =
      hi < hi_target ? static_cast<std::size_t>(std::ceil((hi_target - hi) / p.dz - 1e-9)) : 0;
  p.offset = pad_lo;
  p.n = window.shape[0] + pad_lo + pad_hi;
  p.z.resize(p.n);
  const double base = window.origin[0] - static_cast<double>(pad_lo) * p.dz;
  for (std::size_t i = 0; i < p.n; ++i)
    p.z[i] = base + (static_cast<double>(i) + 0.5) * p.dz;
  return p;
}

// one-sided mass beyond w * T^{1/alpha}, leading tail term
double tail_extent(double alpha, double T, double one_sided_target) {
  const double c = std::tgamma(alpha) * std::sin(M_PI * alpha / 2.0) / M_PI;
  return std::pow(c / one_sided_target, 1.0 / alpha) * std::pow(T, 1.0 / alpha);
}

// integrals over [a,b] of (t-r)^{-1/alpha} and of (r-a)(t-r)^{-1/alpha}
void product_weights(double a, double b, double t, double inva, double& W0, double& W1) {
  const double e1 = 1.0 - inva, e2 = 2.0 - inva;
  const double va = t - a, vb = t - b;
  const double d1 = (std::pow(va, e1) - std::pow(vb, e1)) / e1;
  W0 = d1;
  W1 = va * d1 - (std::pow(va, e2) - std::pow(vb, e2)) / e2;
}

void central_diff(const std::vector<double>& f, double dz, std::vector<double>& out) {
  const std::size_t n = f.size();
  out.resize(n);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * dz);
  out[0] = (f[1] - f[0]) / dz;
  out[n - 1] = (f[n - 1] - f[n - 2]) / dz;
}

// F[y] = sum_z g[z] * vec[y - z + n - 1] * dz  (vec holds kernel(kdiff * dz))
void convolve(const std::vector<double>& g, const std::vector<double>& vec, double dz,
              std::vector<double>& out) {
  const std::size_t n = g.size();
  out.assign(n, 0.0);
  const double* v = vec.data() + (n - 1);
  for (std::size_t z = 0; z < n; ++z) {
    const double gz = g[z];
    if (gz == 0.0) continue;
    const double* row = v - z;
    for (std::size_t y = 0; y < n; ++y) out[y] += gz * row[y];
  }
  for (double& x : out) x *= dz;
}

DensityGrid restrict_to_window(const Lattice& window, double time, const std::vector<double>& full,
                               std::size_t offset, double tail, std::size_t& clamped) {
  DensityGrid g;
  g.lattice = window;
  g.time = time;
  g.values.resize(window.shape[0]);
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    double v = full[offset + i];
    if (v < 0.0) {
      ++clamped;
      v = 0.0;
    }
    g.values[i] = v;
  }
  g.recompute_mass();
  g.tail_mass = tail;
  return g;
}

}  // namespace

std::vector<double> duhamel_time_nodes(double t, std::size_t count, double eps_rel) {
  if (!(t > 0.0)) throw std::domain_error("duhamel_time_nodes: t must be positive");
  if (count < 4) throw std::invalid_argument("duhamel_time_nodes: need at least 4 nodes");
  if (!(eps_rel > 0.0 && eps_rel < 0.5))
    throw std::invalid_argument("duhamel_time_nodes: eps_rel must lie in (0, 0.5)");
  const std::size_t half = count / 2;
  std::vector<double> lower(half);
  const double a = eps_rel * t, b = 0.5 * t;
  const double q = std::pow(b / a, 1.0 / static_cast<double>(half - 1));
  double g = a;
  for (std::size_t i = 0; i < half; ++i, g *= q) lower[i] = g;
  lower[half - 1] = b;
  std::vector<double> s(lower);
  for (std::size_t i = half - 1; i-- > 0;) s.push_back(t - lower[i]);
  s.push_back(t);
  return s;
}

DuhamelSolution solve_diffusion_duhamel(const StableParams& params, const DriftPtr& drift,
                                        double x0, double T, const SpaceTimeGrid& grid,
                                        std::size_t max_iterations, double tolerance,
                                        int workers) {
  validate(params);
  if (params.dim != 1) throw std::invalid_argument("solve_diffusion_duhamel: d = 1 only");
  if (drift->dim() != 1) throw std::invalid_argument("solve_diffusion_duhamel: drift must be 1-d");
  serrin_gap(params.alpha, 1, drift->p_exponent(), drift->q_exponent());
  if (!(T > 0.0)) throw std::domain_error("solve_diffusion_duhamel: T must be positive");
  const std::vector<double>& S = grid.time_nodes;
  if (S.size() < 2 || !std::is_sorted(S.begin(), S.end(), std::less_equal<>()))
    throw std::invalid_argument("solve_diffusion_duhamel: time nodes must be strictly increasing");
  if (!(S.front() > 0.0) || std::abs(S.back() - T) > 1e-12 * T)
    throw std::invalid_argument("solve_diffusion_duhamel: nodes must lie in (0, T] ending at T");
  if (max_iterations == 0 || !(tolerance > 0.0))
    throw std::invalid_argument("solve_diffusion_duhamel: bad iteration budget or tolerance");

  const double alpha = params.alpha;
  const double inva = 1.0 / alpha;
  const double width = grid.lattice.high(0) - grid.lattice.low(0);
  const PaddedAxis ax =
      pad_window(grid.lattice, grid.lattice.low(0) - 0.5 * width, grid.lattice.high(0) + 0.5 * width);
  const std::size_t Np = ax.n;
  const double dz = ax.dz;
  const std::size_t M = S.size();
  const auto table = StableKernelTable::get(alpha);

  // drift values and free kernel on all slices
  std::vector<std::vector<double>> bv(M), P0(M);
  for (std::size_t j = 0; j < M; ++j) {
    bv[j].resize(Np);
    P0[j].resize(Np);
    for (std::size_t z = 0; z < Np; ++z) {
      bv[j][z] = drift->eval(S[j], {ax.z[z]})[0];
      P0[j][z] = table->p(S[j], ax.z[z] - x0);
    }
  }

  // per-slice quadrature layout and translation-invariant kernel vectors
  const double eps_switch = std::pow(1.5 * dz, alpha);
  struct SliceQuad {
    std::vector<std::size_t> dip, ibp;
    std::vector<std::vector<double>> dvec;  // gradient kernel per dipole node
    std::vector<double> ivec;               // density kernel at the interface node
    std::vector<std::vector<double>> pvec;  // density kernel per ibp node
  };
  std::vector<SliceQuad> quad(M);
  parallel_for(
      M,
      [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
          const double t = S[i];
          const double eps = std::min(eps_switch, 0.5 * t);
          auto& q = quad[i];
          for (std::size_t j = 0; j < i; ++j) {
            if (S[j] <= t - eps + 1e-15 * t)
              q.dip.push_back(j);
            else
              q.ibp.push_back(j);
          }
          const std::size_t nk = 2 * Np - 1;
          auto fill = [&](double dt, std::vector<double>& vec, bool gradient) {
            vec.resize(nk);
            for (std::size_t k = 0; k < nk; ++k) {
              const double w = (static_cast<double>(k) - static_cast<double>(Np - 1)) * dz;
              vec[k] = gradient ? table->dp(dt, w) : table->p(dt, w);
            }
          };
          q.dvec.resize(q.dip.size());
          for (std::size_t jj = 0; jj < q.dip.size(); ++jj)
            fill(t - S[q.dip[jj]], q.dvec[jj], true);
          if (!q.dip.empty()) fill(t - S[q.dip.back()], q.ivec, false);
          q.pvec.resize(q.ibp.size());
          for (std::size_t jj = 0; jj < q.ibp.size(); ++jj)
            fill(t - S[q.ibp[jj]], q.pvec[jj], false);
        }
      },
      workers);

  std::vector<std::vector<double>> Gam = P0, Gnew(M);
  DuhamelSolution sol;

  for (std::size_t iter = 1; iter <= max_iterations; ++iter) {
    parallel_for(
        M,
        [&](std::size_t lo, std::size_t hi) {
          std::vector<double> g, F, Gprev, Gcur, diffbuf;
          for (std::size_t i = lo; i < hi; ++i) {
            const double t = S[i];
            const auto& q = quad[i];
            std::vector<double> I(Np, 0.0);

            auto axpy = [&](double w, const std::vector<double>& v) {
              for (std::size_t y = 0; y < Np; ++y) I[y] += w * v[y];
            };

            // dipole region: product integration of (t-r)^{-1/alpha} against
            // a piecewise-linear interpolant of G = (t-r)^{1/alpha} F
            double W0 = 0.0, W1 = 0.0;
            for (std::size_t jj = 0; jj < q.dip.size(); ++jj) {
              const std::size_t j = q.dip[jj];
              g.resize(Np);
              for (std::size_t z = 0; z < Np; ++z) g[z] = Gam[j][z] * bv[j][z];
              convolve(g, q.dvec[jj], dz, F);
              const double scale = std::pow(t - S[j], inva);
              Gcur = F;
              for (double& v : Gcur) v *= scale;
              if (jj == 0) {
                product_weights(0.0, S[j], t, inva, W0, W1);
                axpy(W0, Gcur);
              } else {
                const double ra = S[q.dip[jj - 1]], rb = S[j];
                product_weights(ra, rb, t, inva, W0, W1);
                axpy(W0, Gprev);
                const double slope = 1.0 / (rb - ra);
                for (std::size_t y = 0; y < Np; ++y)
                  I[y] += (Gcur[y] - Gprev[y]) * slope * W1;
              }
              Gprev.swap(Gcur);
            }

            // last stretch: integrate the divergence form against p itself
            // (trapezoid); covers [interface, t] where the dipole is narrower
            // than the lattice
            std::vector<double> rn;
            std::vector<std::vector<double>> Fn;
            if (!q.dip.empty()) {
              const std::size_t j = q.dip.back();
              g.resize(Np);
              for (std::size_t z = 0; z < Np; ++z) g[z] = Gam[j][z] * bv[j][z];
              central_diff(g, dz, diffbuf);
              convolve(diffbuf, q.ivec, dz, F);
              rn.push_back(S[j]);
              Fn.push_back(F);
            }
            for (std::size_t jj = 0; jj < q.ibp.size(); ++jj) {
              const std::size_t j = q.ibp[jj];
              g.resize(Np);
              for (std::size_t z = 0; z < Np; ++z) g[z] = Gam[j][z] * bv[j][z];
              central_diff(g, dz, diffbuf);
              convolve(diffbuf, q.pvec[jj], dz, F);
              rn.push_back(S[j]);
              Fn.push_back(F);
            }
            {
              g.resize(Np);
              for (std::size_t z = 0; z < Np; ++z) g[z] = Gam[i][z] * bv[i][z];
              central_diff(g, dz, diffbuf);
              rn.push_back(t);
              Fn.push_back(diffbuf);
            }
            if (q.dip.empty() && rn.size() >= 2) {
              // no dipole nodes at all: cover [0, first node] with constant G
              product_weights(0.0, rn[0], t, inva, W0, W1);
              const double scale = std::pow(t - rn[0], inva) * W0;
              axpy(scale, Fn[0]);
            }
            for (std::size_t s = 0; s + 1 < rn.size(); ++s) {
              const double w = 0.5 * (rn[s + 1] - rn[s]);
              for (std::size_t y = 0; y < Np; ++y) I[y] += w * (Fn[s][y] + Fn[s + 1][y]);
            }

            Gnew[i].resize(Np);
            for (std::size_t y = 0; y < Np; ++y) Gnew[i][y] = P0[i][y] - I[y];
          }
        },
        workers);

    double res = 0.0;
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t y = 0; y < Np; ++y) {
        const double d =
            std::abs(Gnew[i][y] - Gam[i][y]) / std::max(P0[i][y], 1e-300);
        res = std::max(res, d);
      }
    Gam.swap(Gnew);
    sol.residual_history.push_back(res);
    sol.iterations = iter;
    sol.residual = res;
    if (res < tolerance) {
      sol.converged = true;
      break;
    }
  }
  if (!sol.converged) {
    std::ostringstream os;
    os << "solve_diffusion_duhamel: no fixed point after " << sol.iterations
       << " iterations (weighted residual " << sol.residual
       << "); refine the grid or check the Serrin gap";
    throw DivergenceError(os.str(), sol.residual_history);
  }

  sol.slice_times = S;
  sol.slices.reserve(M);
  for (std::size_t i = 0; i < M; ++i) {
    const double tail =
        1.0 - (table->cdf(S[i], grid.lattice.high(0) - x0) - table->cdf(S[i], grid.lattice.low(0) - x0));
    sol.slices.push_back(restrict_to_window(grid.lattice, S[i], Gam[i], ax.offset, tail, sol.clamped));
  }
  sol.grid = sol.slices.back();
  return sol;
}

double scheme_transition_kernel(double z, double y, double h, const Drift& drift_h,
                                const StableParams& params, double step_start, int time_nodes) {
  validate(params);
  if (params.dim != 1) throw std::invalid_argument("scheme_transition_kernel: d = 1 only");
  if (!(h > 0.0)) throw std::domain_error("scheme_transition_kernel: h must be positive");
  if (time_nodes < 1) throw std::invalid_argument("scheme_transition_kernel: need >= 1 node");
  const auto table = StableKernelTable::get(params.alpha);
  double acc = 0.0;
  for (int m = 0; m < time_nodes; ++m) {
    const double r = step_start + (m + 0.5) * h / time_nodes;
    const double b = drift_h.eval(r, {z})[0];
    acc += table->p(h, y - z - h * b);
  }
  return acc / time_nodes;
}

DuhamelSolution solve_scheme_density(const SchemeConfig& cfg, const DriftPtr& drift,
                                     const Lattice& lattice, int workers) {
  validate(cfg);
  if (cfg.params.dim != 1) throw std::invalid_argument("solve_scheme_density: d = 1 only");
  if (drift->dim() != 1) throw std::invalid_argument("solve_scheme_density: drift must be 1-d");
  lattice.validate();
  if (lattice.dim != 1) throw std::invalid_argument("solve_scheme_density: lattice must be 1-d");

  const double alpha = cfg.params.alpha;
  const double h = cfg.step_size();
  const double x0 = cfg.x0.empty() ? 0.0 : cfg.x0[0];
  const DriftPtr cut = apply_cutoff(cfg.variant, drift, alpha, h, cfg.cutoff_B);
  const int Mr = drift->time_dependent() ? 8 : 1;
  const auto table = StableKernelTable::get(alpha);

  // internal lattice sized so the true tail beyond it stays well under the
  // 1% loss budget (leading tail term at 0.4% per side, plus drift margin)
  const double reach = tail_extent(alpha, cfg.horizon, 0.004) + 3.0;
  const PaddedAxis ax = pad_window(lattice, x0 - reach, x0 + reach);
  const std::size_t Np = ax.n;
  const double dz = ax.dz;
  const std::size_t n = cfg.steps;

  std::vector<double> cur(Np, 0.0), nxt(Np, 0.0);
  std::vector<double> K(Np * Np);
  std::vector<double> row_mass(Np);
  double tail = 0.0;

  DuhamelSolution sol;
  sol.converged = true;
  sol.iterations = n;
  sol.slice_times.reserve(n);
  sol.slices.reserve(n);

  auto fill_rows = [&](std::uint64_t k, bool from_point) {
    const double t_k = static_cast<double>(k) * h;
    const std::size_t rows = from_point ? 1 : Np;
    parallel_for(
        rows,
        [&](std::size_t lo, std::size_t hi) {
          std::vector<double> bm(Mr);
          for (std::size_t zi = lo; zi < hi; ++zi) {
            const double z = from_point ? x0 : ax.z[zi];
            for (int m = 0; m < Mr; ++m)
              bm[m] = cut->eval(t_k + (m + 0.5) * h / Mr, {z})[0];
            double* out = K.data() + zi * Np;
            for (std::size_t yi = 0; yi < Np; ++yi) {
              double acc = 0.0;
              for (int m = 0; m < Mr; ++m) acc += table->p(h, ax.z[yi] - z - h * bm[m]);
              out[yi] = acc / Mr;
            }
          }
        },
        workers);
  };

  for (std::uint64_t k = 0; k < n; ++k) {
    fill_rows(k, k == 0);
    if (k == 0) {
      double m0 = 0.0;
      for (std::size_t yi = 0; yi < Np; ++yi) {
        cur[yi] = K[yi];
        m0 += K[yi];
      }
      tail = 1.0 - m0 * dz;
    } else {
      parallel_for(
          Np,
          [&](std::size_t lo, std::size_t hi) {
            for (std::size_t zi = lo; zi < hi; ++zi) {
              const double* r = K.data() + zi * Np;
              double acc = 0.0;
              for (std::size_t yi = 0; yi < Np; ++yi) acc += r[yi];
              row_mass[zi] = acc * dz;
            }
          },
          workers);
      double lost = 0.0;
      for (std::size_t zi = 0; zi < Np; ++zi) lost += cur[zi] * (1.0 - row_mass[zi]);
      tail += lost * dz;
      parallel_for(
          Np,
          [&](std::size_t lo, std::size_t hi) {
            for (std::size_t yi = lo; yi < hi; ++yi) {
              double acc = 0.0;
              for (std::size_t zi = 0; zi < Np; ++zi) acc += cur[zi] * K[zi * Np + yi];
              nxt[yi] = acc * dz;
            }
          },
          workers);
      cur.swap(nxt);
    }
    if (tail > 0.01) {
      std::ostringstream os;
      os << "solve_scheme_density: accumulated off-lattice mass " << tail << " after step "
         << k + 1 << " exceeds 1%; enlarge the lattice extent";
      throw std::length_error(os.str());
    }
    const double t_next = static_cast<double>(k + 1) * h;
    const double window_tail_estimate = tail + [&] {
      double w = 0.0;
      for (std::size_t i = 0; i < ax.offset; ++i) w += cur[i];
      for (std::size_t i = ax.offset + lattice.shape[0]; i < Np; ++i) w += cur[i];
      return w * dz;
    }();
    sol.slice_times.push_back(t_next);
    sol.slices.push_back(
        restrict_to_window(lattice, t_next, cur, ax.offset, window_tail_estimate, sol.clamped));
  }

  sol.grid = sol.slices.back();
  sol.residual = 0.0;
  return sol;
}

SchemeResidual duhamel_residual_scheme(const DensityGrid& scheme_density, const SchemeConfig& cfg,
                                       const DriftPtr& drift, std::size_t mc_paths,
                                       int nodes_per_step, int workers) {
  validate(cfg);
  if (cfg.params.dim != 1) throw std::invalid_argument("duhamel_residual_scheme: d = 1 only");
  if (nodes_per_step < 1)
    throw std::invalid_argument("duhamel_residual_scheme: need >= 1 node per step");
  if (mc_paths < 100) throw std::invalid_argument("duhamel_residual_scheme: need >= 100 paths");
  scheme_density.lattice.validate();

  const double alpha = cfg.params.alpha;
  const double inva = 1.0 / alpha;
  const double h = cfg.step_size();
  const double t = scheme_density.time;
  const std::uint64_t K = static_cast<std::uint64_t>(std::llround(t / h));
  if (K == 0 || K > cfg.steps || std::abs(static_cast<double>(K) * h - t) > 1e-9 * h)
    throw std::invalid_argument("duhamel_residual_scheme: density time must be a grid time");

  const double x0 = cfg.x0.empty() ? 0.0 : cfg.x0[0];
  const DriftPtr cut = apply_cutoff(cfg.variant, drift, alpha, h, cfg.cutoff_B);
  const auto table = StableKernelTable::get(alpha);
  const SamplerSpec spec{cfg.params, cfg.seed};
  const std::size_t Ny = scheme_density.lattice.shape[0];
  const int M = nodes_per_step;
  const double sub = h / M;
  const double e1 = 1.0 - inva;
  if (mc_paths * Ny > (std::size_t{1} << 28))
    throw std::length_error(
        "duhamel_residual_scheme: per-path accumulator would exceed 2 GiB; "
        "reduce mc_paths or the lattice size");

  // left-node product weights against the (t-r)^{-1/alpha} endpoint scale
  std::vector<double> wts(K * static_cast<std::size_t>(M));
  std::vector<double> rs(wts.size());
  for (std::uint64_t k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m) {
      const double a = static_cast<double>(k) * h + m * sub;
      const double b = a + sub;
      const double W0 = (std::pow(t - a, e1) - std::pow(t - b, e1)) / e1;
      const std::size_t id = k * M + m;
      rs[id] = a;
      wts[id] = W0 * std::pow(t - a, inva);
    }

  std::vector<double> I(mc_paths * Ny);
  parallel_for(
      mc_paths,
      [&](std::size_t lo, std::size_t hi) {
        for (std::size_t path = lo; path < hi; ++path) {
          double* acc = I.data() + path * Ny;
          std::fill(acc, acc + Ny, 0.0);
          double x = x0;
          for (std::uint64_t k = 0; k < K; ++k) {
            const double u01 = CounterStream(cfg.seed, path, k * M, 1).uniform(0);
            const double U = (static_cast<double>(k) + u01) * h;
            const double bval = cut->eval(U, {x})[0];
            double cum = 0.0;
            for (int m = 0; m < M; ++m) {
              const std::size_t id = k * M + m;
              const double xr = x + cum + bval * (rs[id] - static_cast<double>(k) * h);
              const double w = wts[id] * bval;
              if (w != 0.0) {
                const double dt = t - rs[id];
                for (std::size_t yi = 0; yi < Ny; ++yi)
                  acc[yi] += w * table->dp(dt, scheme_density.lattice.coord(yi, 0) - xr);
              }
              cum += sample_increment(spec, sub, path, k * static_cast<std::uint64_t>(M) + m)[0];
            }
            x += cum + bval * h;
          }
        }
      },
      workers);

  SchemeResidual out;
  out.paths = mc_paths;
  const double invN = 1.0 / static_cast<double>(mc_paths);
  for (std::size_t yi = 0; yi < Ny; ++yi) {
    double mean = 0.0, m2 = 0.0;
    for (std::size_t p = 0; p < mc_paths; ++p) mean += I[p * Ny + yi];
    mean *= invN;
    for (std::size_t p = 0; p < mc_paths; ++p) {
      const double d = I[p * Ny + yi] - mean;
      m2 += d * d;
    }
    const double se = std::sqrt(m2 * invN / static_cast<double>(mc_paths - 1));
    const double y = scheme_density.lattice.coord(yi, 0);
    const double rhs = table->p(t, y - x0) - mean;
    const double r = std::abs(scheme_density.values[yi] - rhs);
    if (r > out.value) {
      out.value = r;
      out.std_error = se;
      out.at = y;
    }
  }
  return out;
}

}  // namespace sdelab
