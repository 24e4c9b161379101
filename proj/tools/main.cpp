// sdelab command line: simulate | density | duhamel | converge |
// verify-lemmas | sampler-test. Every run leaves a manifest.json in the
// output directory; failures leave error.json and a nonzero exit code.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sdelab/config.hpp"
#include "sdelab/convergence.hpp"
#include "sdelab/density_mc.hpp"
#include "sdelab/duhamel.hpp"
#include "sdelab/io.hpp"
#include "sdelab/lemma_checks.hpp"
#include "sdelab/stable_sampler.hpp"
#include "sdelab/version.hpp"

namespace {

using Clock = std::chrono::steady_clock;

// env wins over flags and config file (output directory and workers only)
void apply_env(sdelab::ExperimentConfig& cfg) {
  if (const char* out = std::getenv("SDELAB_OUT")) cfg.out_dir = out;
  if (const char* w = std::getenv("SDELAB_WORKERS")) {
    const int n = std::atoi(w);
    if (n > 0) cfg.workers = n;
  }
}

std::string env_out(const std::string& flag_value) {
  if (const char* out = std::getenv("SDELAB_OUT")) return out;
  return flag_value;
}

int env_workers(int flag_value) {
  if (const char* w = std::getenv("SDELAB_WORKERS")) {
    const int n = std::atoi(w);
    if (n > 0) return n;
  }
  return flag_value;
}

std::string slug(const std::string& name) {
  std::string s;
  bool dash = false;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.') {
      s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      dash = false;
    } else if (!dash && !s.empty()) {
      s += '-';
      dash = true;
    }
  }
  while (!s.empty() && s.back() == '-') s.pop_back();
  return s;
}

sdelab::Manifest start_manifest(const std::string& command) {
  sdelab::Manifest m;
  m.command = command;
  return m;
}

void finish_manifest(sdelab::Manifest& m, const Clock::time_point& t0, const std::string& dir) {
  m.elapsed_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  sdelab::write_manifest(m, (std::filesystem::path(dir) / "manifest.json").string());
}

std::string describe(const sdelab::ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "alpha=" << cfg.params.alpha << " d=" << cfg.params.dim << " drift=" << cfg.drift_decl
     << " T=" << cfg.horizon << " n=" << cfg.steps << " variant=" << variant_name(cfg.variant)
     << " seed=" << cfg.seed;
  return os.str();
}

double eval_time_of(const sdelab::ExperimentConfig& cfg) {
  return cfg.eval_time > 0.0 ? cfg.eval_time : cfg.horizon;
}

sdelab::Lattice make_window(const sdelab::ExperimentConfig& cfg, double t) {
  std::array<double, 2> center{0.0, 0.0};
  for (std::size_t a = 0; a < cfg.x0.size() && a < 2; ++a) center[a] = cfg.x0[a];
  const double hw =
      cfg.half_width > 0.0 ? cfg.half_width : sdelab::default_half_width(cfg.params.alpha, t);
  return sdelab::Lattice::centered(cfg.params.dim, center, hw, cfg.lattice_points);
}

int cmd_simulate(const sdelab::ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  auto drift = cfg.make_drift();
  auto sc = cfg.scheme();
  auto paths = sdelab::simulate_paths(sc, drift, cfg.paths);
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path dir(cfg.out_dir);
  sdelab::write_paths_csv(paths, (dir / "paths.csv").string());
  sdelab::write_paths_binary(paths, (dir / "paths.bin").string());

  auto m = start_manifest("simulate");
  m.config_hash = paths.config;
  m.entries = {{"paths.csv", "trajectories, header path_id,t,x_1..x_d"},
               {"paths.bin", "same data, binary block"},
               {"config", describe(cfg)},
               {"paths", std::to_string(cfg.paths)}};
  finish_manifest(m, t0, cfg.out_dir);
  std::cout << "simulate: " << cfg.paths << " paths, " << cfg.steps << " steps -> " << cfg.out_dir
            << "\n";
  return 0;
}

int cmd_density(const sdelab::ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  auto drift = cfg.make_drift();
  auto sc = cfg.scheme();
  const double t = eval_time_of(cfg);
  auto sample = sdelab::simulate_marginal(sc, drift, t, cfg.paths);
  const auto lattice = make_window(cfg, t);
  const double bw = cfg.bandwidth > 0.0
                        ? cfg.bandwidth
                        : sdelab::default_bandwidth(sample, lattice, cfg.params.alpha,
                                                    sc.step_size());
  auto grid = sdelab::kde_estimate(sample, lattice, bw, cfg.workers);

  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path dir(cfg.out_dir);
  sdelab::write_density_csv(grid, (dir / "density.csv").string());
  sdelab::write_density_meta(grid, (dir / "density.json").string());

  std::array<double, 2> x0{0.0, 0.0};
  for (std::size_t a = 0; a < cfg.x0.size() && a < 2; ++a) x0[a] = cfg.x0[a];
  auto ratio = sdelab::heat_kernel_ratio(grid, cfg.params, x0);

  auto m = start_manifest("density");
  m.config_hash = sample.config;
  m.entries = {{"density.csv", "KDE on the lattice"},
               {"density.json", "lattice geometry, mass, bandwidth"},
               {"config", describe(cfg)},
               {"bandwidth", sdelab::format_double(bw)},
               {"mass", sdelab::format_double(grid.mass)},
               {"sup density/p_alpha", sdelab::format_double(ratio.value)}};
  finish_manifest(m, t0, cfg.out_dir);
  std::cout << "density: mass " << grid.mass << " (+ tail " << grid.tail_mass << "), bandwidth "
            << bw << " -> " << cfg.out_dir << "\n";
  return 0;
}

int cmd_duhamel(const sdelab::ExperimentConfig& cfg, bool scheme_mode, std::size_t mc_residual) {
  const auto t0 = Clock::now();
  auto drift = cfg.make_drift();
  const double t = eval_time_of(cfg);
  const auto lattice = make_window(cfg, t);
  const double x0 = cfg.x0.empty() ? 0.0 : cfg.x0[0];

  sdelab::DuhamelSolution sol;
  if (scheme_mode) {
    auto sc = cfg.scheme();
    sol = sdelab::solve_scheme_density(sc, drift, lattice, cfg.workers);
  } else {
    sdelab::SpaceTimeGrid grid{lattice, sdelab::duhamel_time_nodes(t, cfg.duhamel_nodes)};
    sol = sdelab::solve_diffusion_duhamel(cfg.params, drift, x0, t, grid,
                                          cfg.duhamel_max_iterations, cfg.duhamel_tolerance,
                                          cfg.workers);
  }
  std::filesystem::create_directories(cfg.out_dir);
  sdelab::write_duhamel_solution(sol, cfg.out_dir);

  auto m = start_manifest(scheme_mode ? "duhamel --scheme" : "duhamel");
  m.config_hash = sdelab::config_hash(cfg.scheme(), *drift);
  m.entries = {{"solution.json", "iterations, residuals, mass"},
               {"slices", std::to_string(sol.slices.size())},
               {"config", describe(cfg)},
               {"mode", scheme_mode ? "scheme chaining" : "limit Picard"}};

  if (mc_residual > 0) {
    if (!scheme_mode)
      throw std::invalid_argument("--mc-residual applies to --scheme runs only");
    auto res = sdelab::duhamel_residual_scheme(sol.grid, cfg.scheme(), drift, mc_residual, 8,
                                               cfg.workers);
    nlohmann::json j;
    j["paths"] = res.paths;
    j["sup_residual"] = res.value;
    j["std_error_at_sup"] = res.std_error;
    j["at"] = res.at;
    std::ofstream out(std::filesystem::path(cfg.out_dir) / "residual.json");
    out << j.dump(2) << "\n";
    m.entries.emplace_back("residual.json", "Monte Carlo Duhamel identity check");
    std::cout << "duhamel identity: sup residual " << res.value << " (se " << res.std_error
              << ") over " << res.paths << " paths\n";
  }
  finish_manifest(m, t0, cfg.out_dir);
  std::cout << (scheme_mode ? "scheme density" : "duhamel") << ": residual " << sol.residual
            << " after " << sol.iterations << " iteration(s) -> " << cfg.out_dir << "\n";
  return 0;
}

int cmd_converge(const sdelab::ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  sdelab::RateConfig rc;
  rc.params = cfg.params;
  rc.drift = cfg.make_drift();
  rc.x0 = cfg.x0.empty() ? 0.1 : cfg.x0[0];
  rc.horizon = cfg.horizon;
  rc.eval_time = cfg.eval_time;
  rc.ladder = cfg.ladder;
  rc.variant = cfg.variant;
  rc.cutoff_B = cfg.cutoff_B;
  rc.reference = cfg.reference;
  rc.lattice_points = cfg.lattice_points;
  rc.half_width = cfg.half_width;
  rc.duhamel_nodes = cfg.duhamel_nodes;
  rc.duhamel_tolerance = cfg.duhamel_tolerance;
  rc.duhamel_max_iterations = cfg.duhamel_max_iterations;
  rc.seed = cfg.seed;
  rc.workers = cfg.workers;

  auto report = sdelab::rate_experiment(rc);
  sdelab::emit_report(report, cfg.out_dir);

  auto m = start_manifest("converge");
  m.config_hash = sdelab::config_hash(cfg.scheme(), *rc.drift);
  m.entries = {{"ladder.csv", "h vs weighted error"},
               {"fit.json", "log-log slope and verdict"},
               {"plot.gp", "gnuplot script"},
               {"config", describe(cfg)},
               {"reference", report.reference},
               {"gamma", sdelab::format_double(report.gamma)},
               {"slope", sdelab::format_double(report.slope)}};
  finish_manifest(m, t0, cfg.out_dir);

  std::cout << "converge: gamma " << report.gamma << ", theoretical rate " << report.theoretical_rate
            << ", fitted slope " << report.slope << (report.pass ? " [pass]" : " [fail]") << " -> "
            << cfg.out_dir << "\n";
  return report.pass ? 0 : 1;
}

int cmd_verify_lemmas(double alpha, const std::string& suite, const std::string& out_dir,
                      int workers) {
  const auto t0 = Clock::now();
  auto reports = sdelab::run_all_checks(alpha, workers);
  if (suite != "all") {
    std::erase_if(reports, [&](const sdelab::CheckReport& r) {
      return r.lemma.find(suite) == std::string::npos;
    });
    if (reports.empty())
      throw std::invalid_argument("--suite '" + suite + "' matches no check name");
  }
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  std::size_t failed = 0;
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j;
    j["lemma"] = r.lemma;
    j["sweep"] = r.sweep;
    j["constant"] = std::isfinite(r.constant) ? nlohmann::json(r.constant) : nlohmann::json();
    j["coarse_constant"] =
        std::isfinite(r.coarse_constant) ? nlohmann::json(r.coarse_constant) : nlohmann::json();
    j["refinement_drift"] =
        std::isfinite(r.refinement_drift) ? nlohmann::json(r.refinement_drift) : nlohmann::json();
    j["refinement_stable"] = r.refinement_stable;
    j["pass"] = r.pass;
    j["points"] = r.points;
    j["attaining"] = r.attaining;
    j["note"] = r.note;
    std::ofstream out(dir / (slug(r.lemma) + ".json"));
    out << j.dump(2) << "\n";
    summary.push_back({{"lemma", r.lemma}, {"pass", r.pass}});
    if (!r.pass) ++failed;
    std::cout << (r.pass ? "  ok   " : "  FAIL ") << r.lemma << "  C=" << r.constant
              << "  drift=" << r.refinement_drift << "\n";
  }
  {
    std::ofstream out(dir / "summary.json");
    out << summary.dump(2) << "\n";
  }

  auto m = start_manifest("verify-lemmas");
  sdelab::SchemeConfig sc;
  sc.params = {alpha, 1};
  m.config_hash = sdelab::config_hash(sc, *sdelab::zero_drift(1));
  m.entries = {{"alpha", sdelab::format_double(alpha)},
               {"suite", suite},
               {"checks", std::to_string(reports.size())},
               {"failed", std::to_string(failed)}};
  finish_manifest(m, t0, out_dir);
  std::cout << "verify-lemmas: " << (reports.size() - failed) << "/" << reports.size()
            << " checks pass -> " << out_dir << "\n";
  return failed == 0 ? 0 : 1;
}

int cmd_sampler_test(double alpha, std::size_t draws, std::uint64_t seed, double threshold,
                     const std::string& out_dir) {
  const auto t0 = Clock::now();
  sdelab::StableParams params{alpha, 1};
  sdelab::validate(params);
  sdelab::SamplerSpec spec{params, seed};
  auto table = sdelab::StableKernelTable::get(alpha);

  std::vector<double> draws_v(draws);
  for (std::size_t i = 0; i < draws; ++i)
    draws_v[i] = sdelab::sample_increment(spec, 1.0, i, 0)[0];
  std::sort(draws_v.begin(), draws_v.end());
  double ks = 0.0, at = 0.0;
  const double n = static_cast<double>(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    const double F = table->cdf(1.0, draws_v[i]);
    const double lo = static_cast<double>(i) / n, hi = static_cast<double>(i + 1) / n;
    const double d = std::max(std::abs(F - lo), std::abs(F - hi));
    if (d > ks) {
      ks = d;
      at = draws_v[i];
    }
  }
  const bool pass = ks < threshold;

  std::filesystem::create_directories(out_dir);
  nlohmann::json j;
  j["alpha"] = alpha;
  j["draws"] = draws;
  j["seed"] = seed;
  j["ks_distance"] = ks;
  j["attained_at"] = at;
  j["threshold"] = threshold;
  j["pass"] = pass;
  {
    std::ofstream out(std::filesystem::path(out_dir) / "sampler.json");
    out << j.dump(2) << "\n";
  }
  auto m = start_manifest("sampler-test");
  sdelab::SchemeConfig sc;
  sc.params = params;
  sc.seed = seed;
  m.config_hash = sdelab::config_hash(sc, *sdelab::zero_drift(1));
  m.entries = {{"sampler.json", "KS distance vs numeric CDF"},
               {"ks", sdelab::format_double(ks)}};
  finish_manifest(m, t0, out_dir);
  std::cout << "sampler-test: alpha " << alpha << ", " << draws << " draws, KS " << ks
            << (pass ? " [pass]" : " [fail]") << " -> " << out_dir << "\n";
  return pass ? 0 : 1;
}

// flags shared by the config-driven subcommands; flag > config file default
struct Overrides {
  std::string config_file;
  std::string out;
  int workers = -1;
  std::int64_t seed = -1;
  std::int64_t paths = -1;

  sdelab::ExperimentConfig load() const {
    sdelab::ExperimentConfig cfg =
        config_file.empty() ? sdelab::ExperimentConfig{} : sdelab::parse_config(config_file);
    if (!out.empty()) cfg.out_dir = out;
    if (workers >= 0) cfg.workers = workers;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (paths > 0) cfg.paths = static_cast<std::size_t>(paths);
    apply_env(cfg);
    return cfg;
  }
};

void add_common(CLI::App* sub, Overrides& ov, bool config_required) {
  auto* opt = sub->add_option("-c,--config", ov.config_file, "experiment config file");
  if (config_required) opt->required();
  sub->add_option("-o,--out", ov.out, "output directory (overrides config)");
  sub->add_option("--workers", ov.workers, "worker threads (0 = hardware)");
  sub->add_option("--seed", ov.seed, "override the config seed");
  sub->add_option("--paths", ov.paths, "override the config path count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sdelab -- cutoffed Euler-Maruyama schemes driven by alpha-stable noise"};
  app.set_version_flag("--version", std::string("sdelab ") + sdelab::kVersion);
  app.require_subcommand(1);

  Overrides sim_ov, den_ov, duh_ov, con_ov;
  bool duh_scheme = false;
  std::size_t duh_mc = 0;

  auto* sim = app.add_subcommand("simulate", "sample scheme trajectories");
  add_common(sim, sim_ov, true);

  auto* den = app.add_subcommand("density", "KDE of the scheme marginal at the evaluation time");
  add_common(den, den_ov, true);

  auto* duh = app.add_subcommand("duhamel", "limit density via Picard (or --scheme chaining)");
  add_common(duh, duh_ov, true);
  duh->add_flag("--scheme", duh_scheme, "deterministic scheme density instead of the limit");
  duh->add_option("--mc-residual", duh_mc, "paths for the Monte Carlo Duhamel identity check");

  // converge exposes the experiment inline; a config file is optional
  auto* con = app.add_subcommand("converge", "rate ladder against a reference density");
  add_common(con, con_ov, false);
  double c_alpha = 0, c_p = 0, c_q = 0, c_T = 0, c_B = 0, c_x0 = std::nan("");
  std::string c_drift, c_ladder, c_variant, c_reference;
  con->add_option("--alpha", c_alpha, "stability index");
  con->add_option("--drift", c_drift, "drift declaration, e.g. radial:beta=0.3,c=1,R=1");
  con->add_option("--p", c_p, "spatial integrability exponent (inf allowed)");
  con->add_option("--q", c_q, "time integrability exponent (inf allowed)");
  con->add_option("--T", c_T, "horizon");
  con->add_option("--ladder", c_ladder, "comma list of step counts");
  con->add_option("--variant", c_variant, "cutoff variant: standard | bar | none");
  con->add_option("--reference", c_reference, "duhamel | richardson");
  con->add_option("--x0", c_x0, "starting point");
  con->add_option("--cutoff-B", c_B, "cutoff threshold constant");

  double vl_alpha = 1.5;
  std::string vl_suite = "all", vl_out = "out";
  int vl_workers = 0;
  auto* vl = app.add_subcommand("verify-lemmas", "empirical heat-kernel estimate suite");
  vl->add_option("--alpha", vl_alpha, "stability index");
  vl->add_option("--suite", vl_suite, "all, or a substring selecting checks");
  vl->add_option("-o,--out", vl_out, "output directory");
  vl->add_option("--workers", vl_workers, "worker threads");

  double st_alpha = 1.5, st_threshold = 0.01;
  std::size_t st_draws = 100000;
  std::uint64_t st_seed = 1;
  std::string st_out = "out";
  auto* st = app.add_subcommand("sampler-test", "KS test of increments against the numeric CDF");
  st->add_option("--alpha", st_alpha, "stability index");
  st->add_option("--draws", st_draws, "number of draws");
  st->add_option("--seed", st_seed, "stream seed");
  st->add_option("--threshold", st_threshold, "KS pass threshold");
  st->add_option("-o,--out", st_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  std::string err_dir = "out";
  std::string err_kind = "runtime";
  try {
    if (*sim) {
      err_dir = env_out(sim_ov.out.empty() ? err_dir : sim_ov.out);
      auto cfg = sim_ov.load();
      err_dir = cfg.out_dir;
      return cmd_simulate(cfg);
    }
    if (*den) {
      err_dir = env_out(den_ov.out.empty() ? err_dir : den_ov.out);
      auto cfg = den_ov.load();
      err_dir = cfg.out_dir;
      return cmd_density(cfg);
    }
    if (*duh) {
      err_dir = env_out(duh_ov.out.empty() ? err_dir : duh_ov.out);
      auto cfg = duh_ov.load();
      err_dir = cfg.out_dir;
      return cmd_duhamel(cfg, duh_scheme, duh_mc);
    }
    if (*con) {
      err_dir = env_out(con_ov.out.empty() ? err_dir : con_ov.out);
      auto cfg = con_ov.load();
      if (con->count("--alpha")) cfg.params.alpha = c_alpha;
      if (con->count("--drift")) cfg.drift_decl = c_drift;
      if (con->count("--p")) cfg.p = c_p;
      if (con->count("--q")) cfg.q = c_q;
      if (con->count("--T")) cfg.horizon = c_T;
      if (con->count("--variant")) cfg.variant = sdelab::parse_variant(c_variant);
      if (con->count("--reference")) cfg.reference = c_reference;
      if (con->count("--x0")) cfg.x0 = {c_x0};
      if (con->count("--ladder")) {
        cfg.ladder.clear();
        std::istringstream in(c_ladder);
        std::string item;
        while (std::getline(in, item, ',')) cfg.ladder.push_back(std::stoull(item));
      }
      if (con->count("--cutoff-B")) cfg.cutoff_B = c_B;
      err_dir = cfg.out_dir;
      return cmd_converge(cfg);
    }
    if (*vl) {
      vl_out = env_out(vl_out);
      vl_workers = env_workers(vl_workers);
      err_dir = vl_out;
      return cmd_verify_lemmas(vl_alpha, vl_suite, vl_out, vl_workers);
    }
    if (*st) {
      st_out = env_out(st_out);
      err_dir = st_out;
      return cmd_sampler_test(st_alpha, st_draws, st_seed, st_threshold, st_out);
    }
  } catch (const sdelab::ConfigError& e) {
    err_kind = "config";
    std::cerr << e.what() << "\n";
    sdelab::write_error_json((std::filesystem::path(err_dir) / "error.json").string(), err_kind,
                             e.what());
    return 2;
  } catch (const sdelab::DivergenceError& e) {
    err_kind = "divergence";
    std::cerr << "error: " << e.what() << "\n";
    sdelab::write_error_json((std::filesystem::path(err_dir) / "error.json").string(), err_kind,
                             e.what());
    return 3;
  } catch (const std::exception& e) {
    if (dynamic_cast<const std::domain_error*>(&e)) err_kind = "domain";
    else if (dynamic_cast<const std::length_error*>(&e)) err_kind = "extent";
    else if (dynamic_cast<const std::invalid_argument*>(&e)) err_kind = "usage";
    std::cerr << "error: " << e.what() << "\n";
    sdelab::write_error_json((std::filesystem::path(err_dir) / "error.json").string(), err_kind,
                             e.what());
    return 4;
  }
  return 0;
}
