#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sitnikov/io.hpp"
#include "sitnikov/verify.hpp"

namespace py = pybind11;
using namespace sitnikov;

namespace {

py::object as_py(const io::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

BoundaryKind bc_of(const std::string& s) {
    if (s == "periodic") return BoundaryKind::periodic;
    if (s == "fixed_ends") return BoundaryKind::fixed_ends;
    if (s == "free") return BoundaryKind::free_ends;
    throw std::invalid_argument("bc must be periodic, fixed_ends or free");
}

ConnectionSpec spec_of(const std::string& b_minus, const std::string& b_plus, const std::string& middle,
                       long k_minus) {
    return ConnectionSpec::make(PeriodicSymbols::parse(b_minus), PeriodicSymbols::parse(b_plus),
                                SymbolWord::parse(middle), k_minus);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Variational periodic and connecting orbits of the planar Sitnikov problem.";

    py::class_<KeplerDrive>(m, "KeplerDrive")
        .def(py::init<>())
        .def_property_readonly("amplitude", &KeplerDrive::amplitude)
        .def_property_readonly("mu", &KeplerDrive::mu)
        .def("solve_radial_kepler", &KeplerDrive::solve_radial_kepler, py::arg("tau"))
        .def("x_of_t", &KeplerDrive::x_of_t, py::arg("t"))
        .def("xdot_of_t", &KeplerDrive::xdot_of_t, py::arg("t"));

    m.def("lagrangian", &lagrangian, py::arg("drive"), py::arg("t"), py::arg("y"), py::arg("ydot"));

    m.def(
        "block_lengths",
        [](const std::string& word, bool cyclic) { return block_lengths(SymbolWord::parse(word), cyclic); },
        py::arg("word"), py::arg("cyclic") = true);
    m.def(
        "in_m", [](const std::string& word, bool cyclic) { return in_m(SymbolWord::parse(word), cyclic); },
        py::arg("word"), py::arg("cyclic") = true);
    m.def(
        "in_s", [](const std::string& word) { return in_s(PeriodicSymbols::parse(word)); },
        py::arg("word"));

    py::class_<Grid>(m, "Grid")
        .def(py::init([](int nodes_per_unit, long t_start, long t_end) {
                 Grid g{nodes_per_unit, t_start, t_end};
                 g.validate();
                 return g;
             }),
             py::arg("nodes_per_unit"), py::arg("t_start"), py::arg("t_end"))
        .def_readonly("nodes_per_unit", &Grid::nodes_per_unit)
        .def_readonly("t_start", &Grid::t_start)
        .def_readonly("t_end", &Grid::t_end)
        .def_property_readonly("step", &Grid::step)
        .def("node_count", &Grid::node_count)
        .def("time_at", &Grid::time_at, py::arg("i"));

    py::class_<Trajectory>(m, "Trajectory")
        .def(py::init([](Grid grid, const std::string& bc, std::vector<double> values) {
                 Trajectory t{grid, bc_of(bc), std::move(values)};
                 t.validate();
                 return t;
             }),
             py::arg("grid"), py::arg("bc"), py::arg("values"))
        .def_readonly("grid", &Trajectory::grid)
        .def_readonly("values", &Trajectory::values)
        .def_property_readonly("bc", [](const Trajectory& t) {
            return t.bc == BoundaryKind::periodic ? "periodic"
                   : t.bc == BoundaryKind::fixed_ends ? "fixed_ends"
                                                      : "free";
        });

    m.def(
        "action_value",
        [](const KeplerDrive& drive, const Trajectory& traj) {
            return ActionEvaluator(drive, traj.grid).value(traj);
        },
        py::arg("drive"), py::arg("trajectory"));
    m.def(
        "action_gradient",
        [](const KeplerDrive& drive, const Trajectory& traj) {
            return ActionEvaluator(drive, traj.grid).gradient(traj);
        },
        py::arg("drive"), py::arg("trajectory"));
    m.def(
        "admissible",
        [](const Trajectory& traj, const std::string& word) {
            const auto b = PeriodicSymbols::parse(word);
            return admissible(traj, [&](long n) { return b.at(n); });
        },
        py::arg("trajectory"), py::arg("symbols"));
    m.def(
        "el_residual_sup",
        [](const KeplerDrive& drive, const Trajectory& traj) {
            return el_residual_sup(ActionEvaluator(drive, traj.grid), traj);
        },
        py::arg("drive"), py::arg("trajectory"));

    py::class_<PeriodicOrbit>(m, "PeriodicOrbit")
        .def_property_readonly("symbols", [](const PeriodicOrbit& o) { return o.symbols.word().str(); })
        .def_readonly("traj", &PeriodicOrbit::traj)
        .def_readonly("rho_hat", &PeriodicOrbit::rho_hat)
        .def_readonly("grad_sup", &PeriodicOrbit::grad_sup)
        .def_readonly("el_residual_sup", &PeriodicOrbit::el_residual_sup)
        .def_readonly("converged", &PeriodicOrbit::converged)
        .def("to_json", [](const PeriodicOrbit& o) { return io::to_json(o).dump(2); });

    m.def(
        "seed_periodic",
        [](const std::string& word, int nodes, double amplitude) {
            const auto b = PeriodicSymbols::parse(word);
            return seed_periodic(b, Grid{nodes, 0, b.period()}, amplitude);
        },
        py::arg("symbols"), py::arg("nodes") = 64, py::arg("amplitude") = 0.5);

    m.def(
        "minimize_periodic",
        [](const std::string& word, int nodes, int refine, double grad_tol, double seed_amplitude) {
            const KeplerDrive drive;
            const auto b = PeriodicSymbols::parse(word);
            PeriodicSolveOptions opts;
            opts.refine_levels = refine;
            opts.grad_tol = grad_tol;
            opts.seed_amplitude = seed_amplitude;
            return minimize_periodic(drive, b, Grid{nodes, 0, b.period()}, opts);
        },
        py::arg("symbols"), py::arg("nodes") = 64, py::arg("refine") = 2, py::arg("grad_tol") = 1e-10,
        py::arg("seed_amplitude") = 0.5, py::call_guard<py::gil_scoped_release>());

    m.def(
        "rho",
        [](const std::string& word, int nodes, int refine, int jobs) {
            const KeplerDrive drive;
            const auto b = PeriodicSymbols::parse(word);
            PeriodicSolveOptions opts;
            opts.refine_levels = refine;
            MultistartOptions multi;
            multi.jobs = jobs;
            return rho(drive, b, Grid{nodes, 0, b.period()}, opts, multi);
        },
        py::arg("symbols"), py::arg("nodes") = 64, py::arg("refine") = 2, py::arg("jobs") = 1,
        py::call_guard<py::gil_scoped_release>());

    m.def(
        "connect",
        [](const std::string& b_minus, const std::string& b_plus, const std::string& middle, long k_minus,
           int nodes, double tail_tol, double j_tol, int max_windows) {
            const KeplerDrive drive;
            const auto spec = spec_of(b_minus, b_plus, middle, k_minus);
            ConnectionOptions opts;
            opts.nodes_per_unit = nodes;
            opts.tail_tol = tail_tol;
            opts.j_tol = j_tol;
            opts.max_windows = max_windows;
            io::json doc;
            {
                py::gil_scoped_release release;
                const auto problem = build_connection_problem(drive, spec, opts);
                const auto orbit = minimize_connection(drive, problem, opts);
                doc = io::to_json(problem, orbit);
            }
            return as_py(doc);
        },
        py::arg("b_minus"), py::arg("b_plus"), py::arg("middle"), py::arg("k_minus"),
        py::arg("nodes") = 64, py::arg("tail_tol") = 1e-6, py::arg("j_tol") = 1e-8,
        py::arg("max_windows") = 20);

    m.def(
        "verify_periodic",
        [](const PeriodicOrbit& orbit, int samples) {
            const KeplerDrive drive;
            VerifyOptions vopts;
            vopts.lower_bound_samples = samples;
            return as_py(io::to_json(verify_periodic(drive, orbit, Tolerances{}, vopts)));
        },
        py::arg("orbit"), py::arg("samples") = 200);

    m.def("periodic_orbit_from_json",
          [](const std::string& text) { return io::periodic_orbit_from_json(io::json::parse(text)); });
}
