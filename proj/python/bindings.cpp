#include "nldelay/diagnostics.hpp"
#include "nldelay/experiments.hpp"
#include "nldelay/scenario.hpp"
#include "nldelay/schemes.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <stdexcept>

namespace py = pybind11;
using namespace nldelay;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> to_array(const std::vector<double>& v)
{
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::span<const double> view(const Array& a)
{
    if (a.ndim() != 1) throw std::invalid_argument("expected a one-dimensional array");
    return {a.data(), static_cast<std::size_t>(a.size())};
}

py::array_t<double> centers(const Grid& g)
{
    std::vector<double> x(g.cells);
    for (std::size_t j = 0; j < g.cells; ++j) x[j] = g.center(j);
    return to_array(x);
}

py::dict records_dict(const std::vector<DiagnosticsRecord>& rows)
{
    std::vector<double> t, l1, linf, mn, mx, tv, bound, ent;
    for (const auto& r : rows) {
        t.push_back(r.t);
        l1.push_back(r.l1);
        linf.push_back(r.linf);
        mn.push_back(r.min);
        mx.push_back(r.max);
        tv.push_back(r.tv);
        bound.push_back(r.tv_bound);
        ent.push_back(r.entropy_residual_max);
    }
    py::dict d;
    d["t"] = to_array(t);
    d["l1"] = to_array(l1);
    d["linf"] = to_array(linf);
    d["min"] = to_array(mn);
    d["max"] = to_array(mx);
    d["tv"] = to_array(tv);
    d["tv_bound"] = to_array(bound);
    d["entropy_residual_max"] = to_array(ent);
    return d;
}

py::dict simulation_dict(const ResolvedScenario& r, const Simulation& sim)
{
    const auto& m = sim.monitor;
    py::dict d;
    d["x"] = centers(r.setup.grid);
    d["initial"] = to_array(r.setup.initial);
    d["final"] = to_array(sim.result.final_level);
    d["steps"] = sim.result.steps;
    d["final_time"] = sim.result.final_time;
    d["dt"] = r.setup.grid.dt;
    d["delay_steps"] = r.setup.grid.delay_steps;
    d["alpha"] = r.setup.grid.alpha;
    d["passed"] = m.passed();
    d["violations"] = m.violation_counts();
    d["checks"] = m.active_checks();
    d["min"] = m.global_min();
    d["max"] = m.global_max();
    d["sup_tv"] = m.sup_tv();
    d["max_entropy_residual"] = m.max_entropy_residual();
    d["max_conservation_drift"] = m.max_conservation_drift();
    d["log_C"] = m.constants().log_C;
    d["log_K"] = m.constants().log_K;
    d["records"] = records_dict(m.records());
    py::list snaps;
    for (const auto& s : sim.snapshots) snaps.append(py::make_tuple(s.t, to_array(s.level)));
    d["snapshots"] = snaps;
    return d;
}

Scenario with_scheme(Scenario s, const std::optional<std::string>& scheme)
{
    if (scheme) {
        const auto k = parse_scheme(*scheme);
        if (!k) throw std::invalid_argument("unknown scheme '" + *scheme + "'");
        s.scheme = *k;
    }
    return s;
}

py::dict single_step(const Scenario& s, const Array& rho, const Array& lagged)
{
    const ResolvedScenario r = resolve(s);
    const auto& g = r.setup.grid;
    const auto& m = r.setup.model;
    const auto speeds = compute_speeds(view(lagged), r.setup.weights, m.velocity, g.dx, s.boundary);
    Level out = s.scheme == SchemeKind::LaxFriedrichs
                    ? lf_step(view(rho), speeds, g.lambda(), g.alpha, m.saturation, s.boundary)
                    : hw_step(view(rho), speeds, g.lambda(), m.saturation, s.boundary);
    py::dict d;
    d["level"] = to_array(out);
    d["speeds"] = to_array(speeds.raw());
    d["lambda"] = g.lambda();
    d["alpha"] = g.alpha;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Finite-volume solver for the delayed non-local traffic model";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<StepError>(m, "StepError", PyExc_RuntimeError);

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("name", &Scenario::name)
        .def_readwrite("x_min", &Scenario::x_min)
        .def_readwrite("x_max", &Scenario::x_max)
        .def_readwrite("dx", &Scenario::dx)
        .def_readwrite("horizon", &Scenario::horizon)
        .def_readwrite("tau", &Scenario::tau)
        .def_readwrite("safety", &Scenario::safety)
        .def_readwrite("snapshots", &Scenario::snapshots)
        .def_readwrite("output_dir", &Scenario::output_dir)
        .def_readwrite("stride", &Scenario::stride)
        .def_property(
            "scheme", [](const Scenario& s) { return std::string(to_string(s.scheme)); },
            [](Scenario& s, const std::string& v) { s = with_scheme(s, v); })
        .def_property(
            "boundary", [](const Scenario& s) { return std::string(to_string(s.boundary)); },
            [](Scenario& s, const std::string& v) {
                const auto b = parse_boundary(v);
                if (!b) throw std::invalid_argument("unknown boundary '" + v + "'");
                s.boundary = *b;
            })
        .def_property(
            "initial", [](const Scenario& s) { return format_datum(s.initial); },
            [](Scenario& s, const std::string& v) { s.initial = parse_datum(v); })
        .def_property_readonly("max_density", [](const Scenario& s) { return s.velocity.max_density; })
        .def("validate", &Scenario::validate)
        .def("to_config", [](const Scenario& s) { return write_scenario(s); })
        .def("__repr__", [](const Scenario& s) { return "<Scenario " + s.name + ">"; });

    m.def("preset_names", &preset_names);
    m.def("preset", [](const std::string& name) { return preset(name); }, py::arg("name"));
    m.def("parse_scenario", [](const std::string& text) { return parse_scenario(text); }, py::arg("text"));
    m.def("load_scenario", [](const std::filesystem::path& p) { return load_scenario(p); }, py::arg("path"));

    m.def(
        "simulate",
        [](const Scenario& s, std::optional<std::string> scheme, bool entropy) {
            const ResolvedScenario r = resolve(with_scheme(s, scheme));
            SimulationOptions opt;
            opt.monitor.stride = r.scenario.stride;
            opt.monitor.entropy = entropy;
            opt.snapshot_times = r.scenario.snapshots;
            Simulation sim;
            {
                py::gil_scoped_release release;
                sim = simulate(r, opt);
            }
            return simulation_dict(r, sim);
        },
        py::arg("scenario"), py::arg("scheme") = py::none(), py::arg("entropy") = true,
        "Run a scenario in memory and return levels and diagnostics.");

    m.def(
        "run_scenario",
        [](const Scenario& s) {
            RunReport rep;
            {
                py::gil_scoped_release release;
                rep = run_scenario(s);
            }
            py::dict d = simulation_dict(rep.resolved, rep.simulation);
            d["directory"] = rep.directory.string();
            return d;
        },
        py::arg("scenario"), "Run a scenario and write its output directory.");

    m.def("single_step", &single_step, py::arg("scenario"), py::arg("rho"), py::arg("lagged"),
          "Advance one step of the scenario's scheme from `rho` with speeds from `lagged`.");

    m.def(
        "compare_schemes",
        [](const Scenario& s, double ref_dx) {
            const auto rep = compare_schemes(s, ref_dx);
            py::dict d;
            d["passed"] = rep.passed;
            d["lf_error"] = rep.lf_error;
            d["hw_error"] = rep.hw_error;
            return d;
        },
        py::arg("scenario"), py::arg("ref_dx"));

    m.def(
        "tau_sweep",
        [](const Scenario& s, std::vector<double> taus) {
            const auto rep = tau_sweep(s, std::move(taus));
            py::list out;
            for (const auto& e : rep.entries) {
                py::dict d;
                d["tau"] = e.tau;
                d["delay_steps"] = e.delay_steps;
                d["distance"] = e.distance;
                d["final_tv"] = e.final_tv;
                out.append(d);
            }
            return out;
        },
        py::arg("scenario"), py::arg("taus"));

    m.def(
        "total_variation",
        [](const Array& a, const std::string& boundary) {
            const auto b = parse_boundary(boundary);
            if (!b) throw std::invalid_argument("unknown boundary '" + boundary + "'");
            return total_variation(view(a), *b);
        },
        py::arg("level"), py::arg("boundary") = "free-flow");
    m.def("l1_norm", [](const Array& a, double dx) { return l1_norm(view(a), dx); }, py::arg("level"),
          py::arg("dx"));
    m.def("log_tv_factor", &log_tv_factor, py::arg("t"), py::arg("tau"), py::arg("M"));
    m.def("tv_bound", &tv_bound, py::arg("t"), py::arg("tau"), py::arg("M"), py::arg("tv0"));
}
