#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fraclab/config.hpp"
#include "fraclab/experiments.hpp"
#include "fraclab/frac_ops.hpp"
#include "fraclab/kernels.hpp"
#include "fraclab/levy.hpp"
#include "fraclab/metrics.hpp"
#include "fraclab/parallel.hpp"
#include "fraclab/particles.hpp"
#include "fraclab/pde.hpp"
#include "fraclab/pv_quadrature.hpp"

namespace py = pybind11;
using namespace fraclab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const std::vector<double>& v, std::vector<py::ssize_t> shape) {
  Array out(shape);
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<py::ssize_t> grid_shape(const PeriodicGrid& g) {
  return std::vector<py::ssize_t>(static_cast<std::size_t>(g.dim()), g.points());
}

Array field_to_array(const Field& f) {
  auto shape = grid_shape(f.grid());
  shape.insert(shape.begin(), f.species());
  return to_array(f.values(), shape);
}

std::vector<double> flat(const Array& a, const PeriodicGrid& g) {
  if (static_cast<std::size_t>(a.size()) != g.size())
    throw std::invalid_argument("array has " + std::to_string(a.size()) + " entries, grid has " + std::to_string(g.size()));
  return std::vector<double>(a.data(), a.data() + a.size());
}

Field array_to_field(const PeriodicGrid& g, const Array& a) {
  if (a.size() == 0 || static_cast<std::size_t>(a.size()) % g.size() != 0)
    throw std::invalid_argument("field array size is not a multiple of the grid size");
  const int n = static_cast<int>(static_cast<std::size_t>(a.size()) / g.size());
  return Field(g, n, std::vector<double>(a.data(), a.data() + a.size()));
}

py::dict report_dict(const Report& r) {
  py::dict d;
  d["experiment"] = r.experiment;
  d["config_hash"] = r.config_hash;
  d["master_seed"] = r.master_seed;
  d["passed"] = r.passed();
  d["csv"] = r.csv();
  d["verdict_json"] = r.verdict().dump();
  py::list assertions;
  for (const auto& a : r.assertions) assertions.append(py::make_tuple(a.name, a.passed, a.detail));
  d["assertions"] = assertions;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fraclab, m) {
  m.doc() = "Fractional cross-diffusion particle systems and their PDE limits.";

  m.def("set_threads", &set_default_threads, py::arg("threads"));

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_readwrite("n", &ModelParams::n)
      .def_readwrite("d", &ModelParams::d)
      .def_readwrite("alpha", &ModelParams::alpha)
      .def_readwrite("beta", &ModelParams::beta)
      .def_readwrite("sigma", &ModelParams::sigma)
      .def_readwrite("a", &ModelParams::a);

  py::class_<ScalingParams>(m, "ScalingParams")
      .def(py::init<>())
      .def_readwrite("N", &ScalingParams::N)
      .def_readwrite("d", &ScalingParams::d)
      .def_readwrite("delta", &ScalingParams::delta)
      .def_readwrite("rho", &ScalingParams::rho)
      .def_readwrite("kappa", &ScalingParams::kappa)
      .def_readwrite("kappa_hat", &ScalingParams::kappa_hat);

  auto violations = [](const ValidationReport& r) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& v : r.violations) out.emplace_back(v.id, v.description);
    return out;
  };
  m.def("validate_model", [=](const ModelParams& p) { return violations(validate_model(p)); },
        "List of (id, description) violations; empty when admissible.");
  m.def("validate_scaling", [=](const ScalingParams& s) { return violations(validate_scaling(s)); });
  m.def("derived_scales", [](const ScalingParams& s) {
    const auto d = derived_scales(s);
    return py::make_tuple(d.kappa_N, d.kappa_hat_N, d.delta_N);
  }, "(kappa_N, kappa_hat_N, delta_N)");

  py::class_<PeriodicGrid>(m, "Grid")
      .def(py::init<int, double, int>(), py::arg("d"), py::arg("L"), py::arg("M"))
      .def_property_readonly("d", &PeriodicGrid::dim)
      .def_property_readonly("L", &PeriodicGrid::length)
      .def_property_readonly("M", &PeriodicGrid::points)
      .def_property_readonly("h", &PeriodicGrid::spacing)
      .def("nodes", [](const PeriodicGrid& g) {
        std::vector<double> x(static_cast<std::size_t>(g.points()));
        for (int k = 0; k < g.points(); ++k) x[static_cast<std::size_t>(k)] = g.node(k);
        return to_array(x, {g.points()});
      });

  m.def("frac_laplacian", [](const PeriodicGrid& g, const Array& f, double s) {
    return to_array(frac_laplacian(g, flat(f, g), s), grid_shape(g));
  }, py::arg("grid"), py::arg("f"), py::arg("s"));
  m.def("frac_gradient", [](const PeriodicGrid& g, const Array& f, double beta) {
    py::list out;
    for (const auto& c : frac_gradient(g, flat(f, g), beta)) out.append(to_array(c, grid_shape(g)));
    return out;
  }, py::arg("grid"), py::arg("f"), py::arg("beta"));
  m.def("riesz_potential", [](const PeriodicGrid& g, const Array& f, double kappa) {
    return to_array(riesz_potential(g, flat(f, g), kappa), grid_shape(g));
  }, py::arg("grid"), py::arg("f"), py::arg("kappa"));
  m.def("h_alpha_seminorm", [](const PeriodicGrid& g, const Array& f, double alpha) {
    return h_alpha_seminorm(g, flat(f, g), alpha);
  }, py::arg("grid"), py::arg("f"), py::arg("alpha"));
  m.def("l2_norm", [](const PeriodicGrid& g, const Array& f) { return l2_norm(g, flat(f, g)); });
  m.def("pv_frac_laplacian", [](const std::function<double(double)>& f, double x, double alpha, double r_split,
                                double tail_R, double quad_tol) {
    const ScalarFunction g = [&](std::span<const double> y) { return f(y[0]); };
    return pv_frac_laplacian_point(g, std::span<const double>(&x, 1), alpha, r_split, tail_R, quad_tol);
  }, py::arg("f"), py::arg("x"), py::arg("alpha"), py::arg("r_split") = 1.0, py::arg("tail_R") = 1e3,
        py::arg("quad_tol") = 1e-6, "Principal-value (-Delta)^alpha f(x) in one dimension.");

  py::enum_<KernelKind>(m, "KernelKind")
      .value("W", KernelKind::W)
      .value("W_hat", KernelKind::W_hat)
      .value("V_hat", KernelKind::V_hat);
  py::class_<MollifierFamily>(m, "MollifierFamily")
      .def(py::init<const ScalingParams&>())
      .def_property_readonly("kappa_N", &MollifierFamily::kappa_N)
      .def_property_readonly("kappa_hat_N", &MollifierFamily::kappa_hat_N)
      .def("std_dev", &MollifierFamily::std_dev)
      .def("fourier", &MollifierFamily::fourier);
  m.def("free_space_force_profile", &free_space_force_profile, py::arg("family"), py::arg("beta"), py::arg("r"));
  py::class_<InteractionForce>(m, "InteractionForce")
      .def(py::init<const MollifierFamily&, double, double>(), py::arg("family"), py::arg("beta"), py::arg("L"))
      .def("__call__", &InteractionForce::eval_1d, py::arg("dx"));

  m.def("sample_increments", [](double alpha, int d, double sigma, double dt, std::size_t count, std::uint64_t seed) {
    const StableParams p{alpha, d, sigma, dt, 0.0};
    validate(p);
    std::vector<double> out(count * static_cast<std::size_t>(d));
    RngStream rng(seed, {0, 0, 0, StreamPurpose::Test});
    for (std::size_t k = 0; k < count; ++k)
      sample_increment(p, rng, std::span<double>(out).subspan(k * static_cast<std::size_t>(d), static_cast<std::size_t>(d)));
    return to_array(out, {static_cast<py::ssize_t>(count), d});
  }, py::arg("alpha"), py::arg("d"), py::arg("sigma"), py::arg("dt"), py::arg("count"), py::arg("seed"));
  m.def("empirical_char_function", [](const std::vector<double>& s, const std::vector<double>& xi) {
    const auto e = empirical_char_function(s, xi);
    return py::make_tuple(e.real, e.std_err);
  }, "(values, standard errors)");
  m.def("tail_slope", [](const std::vector<double>& s, double lo, double hi) { return tail_slope(s, lo, hi).slope; });

  m.def("bl_metric", [](int d, double L, const std::vector<double>& p1, const std::vector<double>& w1,
                        const std::vector<double>& p2, const std::vector<double>& w2) {
    return bl_metric(Measure::from_points(d, L, p1, w1), Measure::from_points(d, L, p2, w2));
  }, py::arg("d"), py::arg("L"), py::arg("points1"), py::arg("weights1"), py::arg("points2"), py::arg("weights2"));

  py::class_<ExperimentConfig>(m, "Config")
      .def_static("default", &default_config)
      .def_static("parse", [](const std::string& text) {
        std::istringstream is(text);
        return parse_config(is);
      }, py::arg("text"))
      .def_static("load", [](const std::string& path) { return load_config(path); })
      .def_readwrite("model", &ExperimentConfig::model)
      .def_readwrite("scaling", &ExperimentConfig::scaling)
      .def_readwrite("N_list", &ExperimentConfig::N_list)
      .def_readwrite("L", &ExperimentConfig::L)
      .def_readwrite("M", &ExperimentConfig::M)
      .def_readwrite("dt", &ExperimentConfig::pde_dt)
      .def_readwrite("T", &ExperimentConfig::T)
      .def_readwrite("snapshots", &ExperimentConfig::snapshots)
      .def_readwrite("particle_dt", &ExperimentConfig::particle_dt)
      .def_readwrite("master_seed", &ExperimentConfig::master_seed)
      .def_readwrite("seed_count", &ExperimentConfig::seed_count)
      .def_property_readonly("grid", &ExperimentConfig::grid)
      .def("initial_field", [](const ExperimentConfig& c) { return field_to_array(c.initial.evaluate(c.grid())); })
      .def("hash", &ExperimentConfig::hash)
      .def("canonical", &ExperimentConfig::canonical)
      .def("violations", [=](const ExperimentConfig& c) { return violations(validate_config(c)); });

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<UnderResolvedError>(m, "UnderResolvedError", PyExc_ValueError);
  py::register_exception<SolverBlowup>(m, "SolverBlowup", PyExc_RuntimeError);

  m.def("solve_pde", [](const ExperimentConfig& c, const std::string& mode, std::uint64_t N) {
    const auto grid = c.grid();
    std::optional<MollifierFamily> fam;
    SolverMode sm = SolverMode::Limit;
    if (mode == "regularized") {
      ScalingParams s = c.scaling;
      s.N = N;
      s.d = c.model.d;
      fam = MollifierFamily(s);
      sm = SolverMode::Regularized;
    } else if (mode != "limit") {
      throw std::invalid_argument("mode must be 'regularized' or 'limit'");
    }
    SolverConfig sc;
    sc.dt = c.pde_dt;
    sc.T = c.T;
    sc.snapshot_times = c.snapshot_times();
    sc.dealias = c.dealias;
    Trajectory t;
    {
      py::gil_scoped_release release;
      t = PdeSolver(c.model, grid, sm, fam, c.dealias).solve(c.initial.evaluate(grid), sc);
    }
    py::list snaps;
    for (const auto& s : t.snapshots) snaps.append(field_to_array(s));
    py::list mass;
    for (const auto& mon : t.monitors) mass.append(mon.mass);
    return py::make_tuple(t.times, snaps, mass);
  }, py::arg("config"), py::arg("mode") = "regularized", py::arg("N") = 1000,
        "(times, snapshots, per-step masses) for the configured initial data.");

  m.def("experiment_names", &experiment_names);
  m.def("run_experiment", [](const std::string& name, const ExperimentConfig& c, const std::string& out_dir) {
    Report r;
    {
      py::gil_scoped_release release;
      r = run_experiment(name, c);
      if (!out_dir.empty()) write_report(r, out_dir);
    }
    return report_dict(r);
  }, py::arg("name"), py::arg("config"), py::arg("out_dir") = "",
        "Runs a named experiment; writes the output files when out_dir is given.");
}
