#include "kirchlog/analysis.hpp"
#include "kirchlog/energy.hpp"
#include "kirchlog/experiment.hpp"
#include "kirchlog/initial_data.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace kirchlog;

namespace {

// JSON reports cross the boundary as Python objects via the json module.
py::object to_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

ExperimentConfig config_from(const py::object& source) {
    if (source.is_none()) return build_config(ConfigMap{});
    if (py::isinstance<py::dict>(source)) {
        const std::string text = py::module_::import("json").attr("dumps")(source).cast<std::string>();
        return build_config(parse_json_config(text, "<dict>"));
    }
    return build_config(load_config_file(source.cast<std::string>()));
}

py::dict trace_arrays(const SimulationTrace& tr) {
    const std::size_t n = tr.records.size();
    Eigen::VectorXd t(n), dt(n), J(n), I(n), n2(n), gp(n), diss(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = tr.records[i];
        t[i] = r.t, dt[i] = r.dt, J[i] = r.J, I[i] = r.I;
        n2[i] = r.norm2sq, gp[i] = r.gradNormP, diss[i] = r.dissipation;
    }
    py::dict d;
    d["t"] = t;
    d["dt"] = dt;
    d["J"] = J;
    d["I"] = I;
    d["norm2sq"] = n2;
    d["gradNormP"] = gp;
    d["dissipation"] = diss;
    d["final"] = tr.final;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Potential-well laboratory for a pseudo-parabolic Kirchhoff equation with "
              "logarithmic source";
    m.attr("__version__") = library_version();

    py::register_exception<Error>(m, "KirchlogError");
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](double a, double b, int k, double p, double q, double L) {
                 ModelParams mp;
                 mp.a = a, mp.b = b, mp.k = k, mp.p = p, mp.q = q, mp.length = L;
                 mp.validate();
                 return mp;
             }),
             py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("k") = 1, py::arg("p") = 2.0,
             py::arg("q") = 5.0, py::arg("L") = 1.0)
        .def_readwrite("a", &ModelParams::a)
        .def_readwrite("b", &ModelParams::b)
        .def_readwrite("k", &ModelParams::k)
        .def_readwrite("p", &ModelParams::p)
        .def_readwrite("q", &ModelParams::q)
        .def_readwrite("L", &ModelParams::length)
        .def("validate", &ModelParams::validate);

    py::class_<Grid>(m, "Grid")
        .def(py::init<int, double>(), py::arg("N"), py::arg("L") = 1.0)
        .def_property_readonly("N", &Grid::size)
        .def_property_readonly("h", &Grid::spacing)
        .def_property_readonly("L", &Grid::length)
        .def("nodes", &Grid::nodes);

    py::class_<EnergyBreakdown>(m, "EnergyBreakdown")
        .def_readonly("J", &EnergyBreakdown::J)
        .def_readonly("I", &EnergyBreakdown::I)
        .def_readonly("gradP", &EnergyBreakdown::gradP)
        .def_readonly("logTerm", &EnergyBreakdown::logTerm)
        .def_readonly("normQ1", &EnergyBreakdown::normQ1);

    m.def("sine_mode", &sine_mode, py::arg("grid"), py::arg("mode") = 1, py::arg("amplitude") = 1.0);
    m.def("eval_energy", &eval_energy, py::arg("u"), py::arg("params"), py::arg("grid"));
    m.def("eval_I_delta", &eval_I_delta, py::arg("u"), py::arg("delta"), py::arg("params"),
          py::arg("grid"));
    m.def(
        "find_lambda_star",
        [](const Field& u, const ModelParams& p, const Grid& g) {
            return find_lambda_star(u, p, g).lambdaStar;
        },
        py::arg("u"), py::arg("params"), py::arg("grid"));
    m.def(
        "nehari_project", [](const Field& u, const ModelParams& p, const Grid& g) {
            return nehari_project(u, p, g);
        },
        py::arg("u"), py::arg("params"), py::arg("grid"));

    m.def(
        "embedding_constants",
        [](const ModelParams& p, const Grid& g, int restarts, std::uint64_t seed) {
            ConstantOptions o;
            o.restarts = restarts;
            o.seed = seed;
            return to_python(to_json(estimate_embedding_constants(p, g, o)));
        },
        py::arg("params"), py::arg("grid"), py::arg("restarts") = 8, py::arg("seed") = 1);

    m.def(
        "well_depth",
        [](double delta, const ModelParams& p, const Grid& g, int restarts, std::uint64_t seed) {
            WellOptions o;
            o.restarts = restarts;
            o.seed = seed;
            const WellDepth w = compute_well_depth(delta, p, g, o);
            return py::make_tuple(w.d, w.minimizer);
        },
        py::arg("delta"), py::arg("params"), py::arg("grid"), py::arg("restarts") = 8,
        py::arg("seed") = 1);

    m.def(
        "classify",
        [](const Field& u0, const ModelParams& p, const Grid& g, double d, py::dict constants) {
            WellContext ctx;
            ctx.d = d;
            auto get = [&](const char* k) { return constants[k].cast<double>(); };
            ctx.constants.S = get("S");
            ctx.constants.S1 = get("S1");
            ctx.constants.betaGN = get("betaGN");
            ctx.constants.theta = get("theta");
            ctx.constants.Cstar = get("Cstar");
            ctx.constants.Clower = get("Clower");
            ctx.constants.Kp = get("Kp");
            return to_python(to_json(classify(u0, p, g, ctx)));
        },
        py::arg("u0"), py::arg("params"), py::arg("grid"), py::arg("d"), py::arg("constants"));

    m.def(
        "run",
        [](const Field& u0, const ModelParams& p, const Grid& g, double t_end, double dt0,
           double dt_max) {
            StepperConfig c;
            c.tEnd = t_end;
            c.dt0 = dt0;
            c.dtMax = dt_max;
            RunResult r;
            {
                py::gil_scoped_release release;
                r = run(u0, p, g, c);
            }
            py::dict out = trace_arrays(r.trace);
            out["outcome"] = to_python(to_json(r.outcome));
            return out;
        },
        py::arg("u0"), py::arg("params"), py::arg("grid"), py::arg("t_end") = 1.0,
        py::arg("dt0") = 1e-4, py::arg("dt_max") = 1e-2);

    m.def(
        "ground_state",
        [](const ModelParams& p, const Grid& g) {
            const GroundState gs = ground_state(p, g);
            py::dict d;
            d["uStar"] = gs.uStar;
            d["JStar"] = gs.JStar;
            d["IStar"] = gs.IStar;
            d["d"] = gs.d;
            d["residual"] = gs.stationarityResidual;
            d["converged"] = gs.converged;
            return d;
        },
        py::arg("params"), py::arg("grid"));

    // command-level entry points; config is None, a dict of sections or a file path
    auto command = [&m](const char* name, nlohmann::json (*fn)(const ExperimentConfig&, const std::string&)) {
        m.def(
            name,
            [fn](const py::object& config, const std::string& out) {
                const ExperimentConfig cfg = config_from(config);
                nlohmann::json j;
                {
                    py::gil_scoped_release release;
                    j = fn(cfg, out);
                }
                return to_python(j);
            },
            py::arg("config") = py::none(), py::arg("out") = "out");
    };
    command("cmd_constants", &cmd_constants);
    command("cmd_well", &cmd_well);
    command("cmd_ground_state", &cmd_ground_state);
    command("cmd_classify", &cmd_classify);
    command("cmd_simulate", &cmd_simulate);
    command("cmd_sweep", &cmd_sweep);

    m.attr("TRACE_CSV_HEADER") = kTraceCsvHeader;
    m.attr("PHASE_MAP_CSV_HEADER") = kPhaseMapCsvHeader;
}
