#include "sdelab/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sdelab {

namespace {

constexpr double kWeightFloor = 1e-12;

// slice index of the evaluation time in an n-step run, or npos
std::size_t slice_index(double t, double horizon, std::size_t n) {
  const double h = horizon / static_cast<double>(n);
  const double k = t / h;
  const auto idx = static_cast<std::size_t>(std::llround(k));
  if (idx < 1 || idx > n || std::abs(k - static_cast<double>(idx)) > 1e-9)
    return static_cast<std::size_t>(-1);
  return idx - 1;
}

SchemeConfig scheme_config(const RateConfig& cfg, std::size_t n) {
  SchemeConfig sc;
  sc.params = cfg.params;
  sc.horizon = cfg.horizon;
  sc.steps = n;
  sc.variant = cfg.variant;
  sc.cutoff_B = cfg.cutoff_B;
  sc.x0 = {cfg.x0};
  sc.seed = cfg.seed;
  sc.workers = cfg.workers;
  return sc;
}

}  // namespace

WeightedError weighted_error(const DensityGrid& a, const DensityGrid& b,
                             const StableParams& params, double x0) {
  validate(params);
  a.lattice.validate();
  if (params.dim != 1 || a.lattice.dim != 1)
    throw std::invalid_argument("weighted_error: d = 1 only");
  if (!a.lattice.same_geometry(b.lattice))
    throw std::invalid_argument("weighted_error: densities live on different lattices");
  const double tscale = std::max(std::abs(a.time), 1.0);
  if (std::abs(a.time - b.time) > 1e-9 * tscale)
    throw std::invalid_argument("weighted_error: densities taken at different times");
  const auto table = StableKernelTable::get(params.alpha);
  WeightedError out;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double y = a.lattice.coord(i, 0);
    const double w = table->p(a.time, y - x0);
    if (w < kWeightFloor) {
      ++out.excluded;
      continue;
    }
    const double e = std::abs(a.values[i] - b.values[i]) / w;
    if (e > out.value) {
      out.value = e;
      out.at = y;
    }
  }
  return out;
}

RateReport rate_experiment(const RateConfig& cfg) {
  validate(cfg.params);
  if (!cfg.drift) throw std::invalid_argument("rate_experiment: drift is required");
  if (cfg.params.dim != 1) throw std::invalid_argument("rate_experiment: d = 1 only");
  if (cfg.ladder.size() < 2)
    throw std::invalid_argument("rate_experiment: ladder needs at least two step counts");
  if (!(cfg.horizon > 0.0)) throw std::domain_error("rate_experiment: horizon must be positive");
  if (cfg.reference != "duhamel" && cfg.reference != "richardson")
    throw std::invalid_argument("rate_experiment: reference must be 'duhamel' or 'richardson'");

  RateReport rep;
  rep.alpha = cfg.params.alpha;
  rep.gamma =
      serrin_gap(cfg.params.alpha, 1, cfg.drift->p_exponent(), cfg.drift->q_exponent()).gamma;
  rep.theoretical_rate = rep.gamma / cfg.params.alpha;
  rep.reference = cfg.reference;
  rep.x0 = cfg.x0;
  rep.drift_description = cfg.drift->describe();

  const double t = cfg.eval_time > 0.0 ? cfg.eval_time : cfg.horizon;
  rep.eval_time = t;

  std::vector<std::size_t> ladder = cfg.ladder;
  std::sort(ladder.begin(), ladder.end());
  for (std::size_t n : ladder)
    if (slice_index(t, cfg.horizon, n) == static_cast<std::size_t>(-1))
      throw std::invalid_argument(
          "rate_experiment: eval_time must be a step-grid time for every ladder entry");

  const double hw =
      cfg.half_width > 0.0 ? cfg.half_width : 8.0 * std::pow(t, 1.0 / cfg.params.alpha);
  const Lattice lattice = Lattice::centered(1, {cfg.x0}, hw, cfg.lattice_points);

  // scheme runs for the drift under study and for the zero-drift calibration
  const DriftPtr b0 = zero_drift(1);
  const auto table = StableKernelTable::get(cfg.params.alpha);
  DensityGrid exact;
  exact.lattice = lattice;
  exact.time = t;
  exact.values.resize(lattice.size());
  for (std::size_t i = 0; i < exact.values.size(); ++i)
    exact.values[i] = table->p(t, lattice.coord(i, 0) - cfg.x0);
  exact.recompute_mass();

  std::vector<DensityGrid> runs(ladder.size());
  rep.points.resize(ladder.size());
  for (std::size_t li = 0; li < ladder.size(); ++li) {
    const std::size_t n = ladder[li];
    auto& pt = rep.points[li];
    pt.steps = n;
    pt.h = cfg.horizon / static_cast<double>(n);

    const auto sol = solve_scheme_density(scheme_config(cfg, n), cfg.drift, lattice, cfg.workers);
    runs[li] = sol.slices.at(slice_index(t, cfg.horizon, n));

    const auto cal = solve_scheme_density(scheme_config(cfg, n), b0, lattice, cfg.workers);
    const auto cal_slice = cal.slices.at(slice_index(t, cfg.horizon, n));
    pt.noise_floor = 3.0 * weighted_error(cal_slice, exact, cfg.params, cfg.x0).value;
  }

  DensityGrid ref;
  std::size_t skip = static_cast<std::size_t>(-1);
  if (cfg.reference == "duhamel") {
    SpaceTimeGrid grid{lattice, duhamel_time_nodes(t, cfg.duhamel_nodes)};
    const auto sol = solve_diffusion_duhamel(cfg.params, cfg.drift, cfg.x0, t, grid,
                                             cfg.duhamel_max_iterations, cfg.duhamel_tolerance,
                                             cfg.workers);
    ref = sol.grid;
  } else {
    skip = ladder.size() - 1;  // finest run serves as the reference
    ref = runs[skip];
    rep.points[skip].note = "reference point";
  }

  for (std::size_t li = 0; li < ladder.size(); ++li) {
    auto& pt = rep.points[li];
    if (li == skip) continue;
    pt.error = weighted_error(runs[li], ref, cfg.params, cfg.x0).value;
    pt.below_floor = pt.error < pt.noise_floor;
    pt.usable = std::isfinite(pt.error) && !pt.below_floor;
    if (pt.below_floor) pt.note = "below calibration floor";
  }

  // least squares in log-log over usable points
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (const auto& pt : rep.points) {
    if (!pt.usable) continue;
    const double x = std::log(pt.h), y = std::log(pt.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) {
    rep.degenerate = true;
    rep.note = "fewer than two usable ladder points";
    return rep;
  }
  const double denom = static_cast<double>(m) * sxx - sx * sx;
  rep.slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
  const double intercept = (sy - rep.slope * sx) / static_cast<double>(m);
  double ss = 0;
  for (const auto& pt : rep.points) {
    if (!pt.usable) continue;
    const double r = std::log(pt.error) - (intercept + rep.slope * std::log(pt.h));
    ss += r * r;
  }
  rep.fit_residual = std::sqrt(ss / static_cast<double>(m));
  rep.pass = rep.slope >= rep.theoretical_rate - rep.tolerance_band;
  if (!rep.pass) {
    std::ostringstream os;
    os << "slope " << rep.slope << " falls short of " << rep.theoretical_rate << " - "
       << rep.tolerance_band;
    rep.note = os.str();
  }
  return rep;
}

void emit_report(const RateReport& rep, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);

  {
    std::ofstream csv(fs::path(directory) / "ladder.csv");
    csv << "steps,h,error,noise_floor,usable,note\n";
    char buf[512];
    for (const auto& pt : rep.points) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%d,", pt.steps, pt.h, pt.error,
                    pt.noise_floor, pt.usable ? 1 : 0);
      csv << buf << pt.note << "\n";
    }
  }

  {
    nlohmann::json j;
    j["alpha"] = rep.alpha;
    j["gamma"] = rep.gamma;
    j["theoretical_rate"] = rep.theoretical_rate;
    j["slope"] = std::isfinite(rep.slope) ? nlohmann::json(rep.slope) : nlohmann::json();
    j["fit_residual"] = rep.fit_residual;
    j["tolerance_band"] = rep.tolerance_band;
    j["reference"] = rep.reference;
    j["pass"] = rep.pass;
    j["degenerate"] = rep.degenerate;
    j["note"] = rep.note;
    j["eval_time"] = rep.eval_time;
    j["x0"] = rep.x0;
    j["drift"] = rep.drift_description;
    j["points"] = nlohmann::json::array();
    for (const auto& pt : rep.points)
      j["points"].push_back({{"steps", pt.steps},
                             {"h", pt.h},
                             {"error", pt.error},
                             {"noise_floor", pt.noise_floor},
                             {"below_floor", pt.below_floor},
                             {"usable", pt.usable},
                             {"note", pt.note}});
    std::ofstream out(fs::path(directory) / "fit.json");
    out << j.dump(2) << "\n";
  }

  {
    std::ofstream gp(fs::path(directory) / "plot.gp");
    gp << "set logscale xy\n"
       << "set xlabel 'h'\n"
       << "set ylabel 'weighted sup error'\n"
       << "set datafile separator ','\n"
       << "set key left top\n";
    gp << "ref(x) = " << std::scientific;
    // anchor the reference-rate guide line at the first usable point
    double ax = 1.0, ay = 1.0;
    for (const auto& pt : rep.points)
      if (pt.usable) {
        ax = pt.h;
        ay = pt.error;
        break;
      }
    gp << ay << " * (x/" << ax << ")**" << rep.theoretical_rate << "\n";
    gp << "plot 'ladder.csv' using 2:3 skip 1 with linespoints title 'measured', \\\n"
       << "     ref(x) with lines dashtype 2 title sprintf('slope %g', " << rep.theoretical_rate
       << ")\n";
  }
}

}  // namespace sdelab
