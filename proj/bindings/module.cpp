#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdelab/config.hpp"
#include "sdelab/convergence.hpp"
#include "sdelab/density_mc.hpp"
#include "sdelab/duhamel.hpp"
#include "sdelab/lemma_checks.hpp"
#include "sdelab/stable_sampler.hpp"
#include "sdelab/version.hpp"

namespace py = pybind11;
using namespace sdelab;

namespace {

struct PyDrift {
  DriftPtr ptr;
};

std::vector<double> lattice_nodes(const Lattice& lat, int axis) {
  std::vector<double> out(lat.shape[static_cast<std::size_t>(axis)]);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = lat.coord(i, axis);
  return out;
}

}  // namespace

PYBIND11_MODULE(_sdelab, m) {
  m.doc() = "cutoffed Euler-Maruyama schemes driven by isotropic alpha-stable noise";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);

  py::class_<StableParams>(m, "StableParams")
      .def(py::init<double, int>(), py::arg("alpha"), py::arg("dim") = 1)
      .def_readwrite("alpha", &StableParams::alpha)
      .def_readwrite("dim", &StableParams::dim);

  // kernel: direct inversion quadrature for scalar queries
  m.def(
      "density",
      [](double alpha, int dim, double t, double z) {
        KernelQuery q{t, std::vector<double>(static_cast<std::size_t>(dim), 0.0)};
        q.point[0] = z;
        return density(StableParams{alpha, dim}, q);
      },
      py::arg("alpha"), py::arg("dim"), py::arg("t"), py::arg("z"),
      "isotropic stable density at radius z");
  m.def(
      "grad_density",
      [](double alpha, int dim, double t, double z) {
        KernelQuery q{t, std::vector<double>(static_cast<std::size_t>(dim), 0.0)};
        q.point[0] = z;
        return grad_density(StableParams{alpha, dim}, q);
      },
      py::arg("alpha"), py::arg("dim"), py::arg("t"), py::arg("z"));
  m.def(
      "cdf",
      [](double alpha, double t, double x) { return StableKernelTable::get(alpha)->cdf(t, x); },
      py::arg("alpha"), py::arg("t"), py::arg("x"), "d=1 distribution function");

  m.def(
      "serrin_gap",
      [](double alpha, int dim, double p, double q) { return serrin_gap(alpha, dim, p, q).gamma; },
      py::arg("alpha"), py::arg("dim"), py::arg("p"), py::arg("q"),
      "gamma = alpha - 1 - (d/p + alpha/q); throws when supercritical");
  m.def(
      "cutoff_threshold",
      [](const std::string& variant, double alpha, int dim, double p, double q, double h,
         double B) { return cutoff_threshold(parse_variant(variant), alpha, dim, p, q, h, B); },
      py::arg("variant"), py::arg("alpha"), py::arg("dim"), py::arg("p"), py::arg("q"),
      py::arg("h"), py::arg("B") = 1.0);

  // DriftPtr is shared_ptr-to-const, which pybind cannot use as a holder;
  // a value wrapper keeps the python side simple
  py::class_<PyDrift>(m, "Drift")
      .def_property_readonly("p", [](const PyDrift& b) { return b.ptr->p_exponent(); })
      .def_property_readonly("q", [](const PyDrift& b) { return b.ptr->q_exponent(); })
      .def("__repr__", [](const PyDrift& b) { return "<Drift " + b.ptr->describe() + ">"; })
      .def("__call__", [](const PyDrift& b, double t, std::vector<double> x) {
        return b.ptr->eval(t, x);
      });
  m.def(
      "drift",
      [](const std::string& declaration, double p, double q, int dim) {
        return PyDrift{parse_drift_declaration(declaration, p, q, dim)};
      },
      py::arg("declaration"), py::arg("p") = std::numeric_limits<double>::infinity(),
      py::arg("q") = std::numeric_limits<double>::infinity(), py::arg("dim") = 1,
      "build a drift from a declaration like 'radial:beta=0.3,c=1,R=1'");
  m.def(
      "apply_cutoff",
      [](const std::string& variant, const PyDrift& b, double alpha, double h, double B) {
        return PyDrift{apply_cutoff(parse_variant(variant), b.ptr, alpha, h, B)};
      },
      py::arg("variant"), py::arg("drift"), py::arg("alpha"), py::arg("h"), py::arg("B") = 1.0);

  m.def(
      "sample_increments",
      [](double alpha, int dim, double dt, std::size_t count, std::uint64_t seed,
         std::uint64_t step) {
        return sample_increments(SamplerSpec{{alpha, dim}, seed}, dt, count, step);
      },
      py::arg("alpha"), py::arg("dim"), py::arg("dt"), py::arg("count"), py::arg("seed") = 0,
      py::arg("step") = 0, "row-major count x dim stable increments");

  py::class_<SchemeConfig>(m, "SchemeConfig")
      .def(py::init([](double alpha, int dim, double horizon, std::uint64_t steps,
                       const std::string& variant, double cutoff_B, std::vector<double> x0,
                       std::uint64_t seed, int workers) {
             SchemeConfig cfg;
             cfg.params = {alpha, dim};
             cfg.horizon = horizon;
             cfg.steps = steps;
             cfg.variant = parse_variant(variant);
             cfg.cutoff_B = cutoff_B;
             cfg.x0 = std::move(x0);
             cfg.seed = seed;
             cfg.workers = workers;
             validate(cfg);
             return cfg;
           }),
           py::arg("alpha"), py::arg("dim") = 1, py::arg("horizon") = 1.0, py::arg("steps") = 16,
           py::arg("variant") = "standard", py::arg("cutoff_B") = 1.0,
           py::arg("x0") = std::vector<double>{}, py::arg("seed") = 1, py::arg("workers") = 0)
      .def_readwrite("horizon", &SchemeConfig::horizon)
      .def_readwrite("steps", &SchemeConfig::steps)
      .def_readwrite("seed", &SchemeConfig::seed)
      .def_property_readonly("step_size", &SchemeConfig::step_size);

  py::class_<MarginalSample>(m, "MarginalSample")
      .def_readonly("time", &MarginalSample::time)
      .def_readonly("count", &MarginalSample::count)
      .def_readonly("dim", &MarginalSample::dim)
      .def_readonly("data", &MarginalSample::data)
      .def_readonly("config", &MarginalSample::config);
  m.def(
      "simulate_marginal",
      [](const SchemeConfig& cfg, const PyDrift& b, double t, std::size_t count) {
        py::gil_scoped_release release;
        return simulate_marginal(cfg, b.ptr, t, count);
      },
      py::arg("config"), py::arg("drift"), py::arg("t"), py::arg("count"));

  py::class_<Lattice>(m, "Lattice")
      .def_static(
          "centered",
          [](int dim, std::vector<double> center, double half_width, std::size_t nodes) {
            std::array<double, 2> c{0.0, 0.0};
            for (std::size_t a = 0; a < center.size() && a < 2; ++a) c[a] = center[a];
            return Lattice::centered(dim, c, half_width, nodes);
          },
          py::arg("dim"), py::arg("center"), py::arg("half_width"), py::arg("nodes"))
      .def_readonly("spacing", &Lattice::spacing)
      .def_readonly("dim", &Lattice::dim)
      .def("nodes", &lattice_nodes, py::arg("axis") = 0)
      .def("__len__", &Lattice::size);

  py::class_<DensityGrid>(m, "DensityGrid")
      .def_readonly("time", &DensityGrid::time)
      .def_readonly("values", &DensityGrid::values)
      .def_readonly("mass", &DensityGrid::mass)
      .def_readonly("tail_mass", &DensityGrid::tail_mass)
      .def_readonly("bandwidth", &DensityGrid::bandwidth)
      .def_property_readonly("lattice", [](const DensityGrid& g) { return g.lattice; });

  m.def("kde_estimate", &kde_estimate, py::arg("samples"), py::arg("lattice"),
        py::arg("bandwidth"), py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>());
  m.def("default_bandwidth", &default_bandwidth, py::arg("samples"), py::arg("lattice"),
        py::arg("alpha"), py::arg("step"));
  m.def("default_half_width", &default_half_width, py::arg("alpha"), py::arg("t"));

  py::class_<DuhamelSolution>(m, "DuhamelSolution")
      .def_readonly("grid", &DuhamelSolution::grid)
      .def_readonly("slice_times", &DuhamelSolution::slice_times)
      .def_readonly("iterations", &DuhamelSolution::iterations)
      .def_readonly("converged", &DuhamelSolution::converged)
      .def_readonly("residual", &DuhamelSolution::residual)
      .def_readonly("residual_history", &DuhamelSolution::residual_history);

  m.def(
      "solve_duhamel",
      [](const StableParams& params, const DriftPtr& drift, double x0, double T,
         const Lattice& lattice, std::size_t nodes, std::size_t max_iterations, double tolerance,
         int workers) {
        SpaceTimeGrid grid{lattice, duhamel_time_nodes(T, nodes)};
        return solve_diffusion_duhamel(params, drift, x0, T, grid, max_iterations, tolerance,
                                       workers);
      },
      py::arg("params"), py::arg("drift"), py::arg("x0"), py::arg("T"), py::arg("lattice"),
      py::arg("nodes") = 64, py::arg("max_iterations") = 40, py::arg("tolerance") = 1e-6,
      py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>(),
      "limit density on the lattice via Picard iteration of the Duhamel identity");
  m.def("solve_scheme_density", &solve_scheme_density, py::arg("config"), py::arg("drift"),
        py::arg("lattice"), py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>(),
        "deterministic marginal density of the scheme by chaining one-step kernels");

  py::class_<CheckReport>(m, "CheckReport")
      .def_readonly("lemma", &CheckReport::lemma)
      .def_readonly("constant", &CheckReport::constant)
      .def_readonly("refinement_drift", &CheckReport::refinement_drift)
      .def_readonly("pass_", &CheckReport::pass)
      .def_readonly("attaining", &CheckReport::attaining)
      .def_readonly("note", &CheckReport::note)
      .def("__repr__", [](const CheckReport& r) {
        return "<CheckReport " + r.lemma + (r.pass ? " pass" : " FAIL") + ">";
      });
  m.def("run_lemma_checks", &run_all_checks, py::arg("alpha"), py::arg("workers") = 0,
        py::call_guard<py::gil_scoped_release>());

  py::class_<RateReport>(m, "RateReport")
      .def_readonly("alpha", &RateReport::alpha)
      .def_readonly("gamma", &RateReport::gamma)
      .def_readonly("theoretical_rate", &RateReport::theoretical_rate)
      .def_readonly("slope", &RateReport::slope)
      .def_readonly("pass_", &RateReport::pass)
      .def_readonly("note", &RateReport::note);
  m.def(
      "rate_experiment",
      [](double alpha, const std::string& drift_decl, double p, double q, double T,
         std::vector<std::size_t> ladder, const std::string& variant, const std::string& reference,
         double x0, std::size_t lattice_points, std::size_t nodes, int workers) {
        RateConfig rc;
        rc.params = {alpha, 1};
        rc.drift = parse_drift_declaration(drift_decl, p, q, 1);
        rc.horizon = T;
        rc.ladder = std::move(ladder);
        rc.variant = parse_variant(variant);
        rc.reference = reference;
        rc.x0 = x0;
        rc.lattice_points = lattice_points;
        rc.duhamel_nodes = nodes;
        rc.workers = workers;
        return rate_experiment(rc);
      },
      py::arg("alpha"), py::arg("drift"), py::arg("p"), py::arg("q"), py::arg("T") = 1.0,
      py::arg("ladder") = std::vector<std::size_t>{8, 16, 32, 64}, py::arg("variant") = "standard",
      py::arg("reference") = "duhamel", py::arg("x0") = 0.1, py::arg("lattice_points") = 200,
      py::arg("nodes") = 64, py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>());

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readonly("drift_decl", &ExperimentConfig::drift_decl)
      .def_readonly("horizon", &ExperimentConfig::horizon)
      .def_readonly("steps", &ExperimentConfig::steps)
      .def_readonly("seed", &ExperimentConfig::seed)
      .def_readonly("paths", &ExperimentConfig::paths)
      .def_readonly("out_dir", &ExperimentConfig::out_dir)
      .def_property_readonly("alpha", [](const ExperimentConfig& c) { return c.params.alpha; })
      .def_property_readonly("dim", [](const ExperimentConfig& c) { return c.params.dim; })
      .def("scheme", &ExperimentConfig::scheme)
      .def("make_drift", &ExperimentConfig::make_drift);
  m.def("parse_config_text", &parse_config_text, py::arg("text"),
        "parse and fully validate a key = value experiment description");
}
