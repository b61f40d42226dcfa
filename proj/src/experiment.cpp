#include "kirchlog/experiment.hpp"

#include "kirchlog/energy.hpp"
#include "kirchlog/initial_data.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

namespace kirchlog {

namespace fs = std::filesystem;
using nlohmann::json;

std::string library_version() { return "0.1.0"; }

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Non-finite doubles have no JSON spelling; they become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

fs::path prepare_dir(const std::string& dir) {
    fs::path p(dir.empty() ? "." : dir);
    fs::create_directories(p);
    return p;
}

json config_echo(const ExperimentConfig& cfg) {
    json j = json::object();
    for (const auto& [k, v] : describe_config(cfg)) j[k] = v;
    return j;
}

json header(const ExperimentConfig& cfg, const char* command) {
    json j;
    j["command"] = command;
    j["version"] = library_version();
    j["seed"] = cfg.seed;
    j["config"] = config_echo(cfg);
    return j;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// Keys that leave the landscape unchanged; sweeping anything else forces a
// landscape per cell.
bool landscape_independent(const std::string& key) {
    return key.rfind("stepper.", 0) == 0 || key.rfind("initial.", 0) == 0 ||
           key.rfind("output.", 0) == 0;
}

std::string landscape_key(const ExperimentConfig& c) {
    const auto all = describe_config(c);
    std::string key;
    for (const auto& [k, v] : all)
        if (!landscape_independent(k) && k.rfind("sweep.", 0) != 0) key += k + "=" + v + ";";
    return key;
}

}  // namespace

json to_json(const EmbeddingConstants& c) {
    return json{{"S", c.S},           {"S1", c.S1},         {"betaGN", c.betaGN},
                {"theta", c.theta},   {"Cstar", c.Cstar},   {"Clower", c.Clower},
                {"Kp", c.Kp}};
}

json to_json(const Classification& c) {
    return json{{"J0", c.Ju0},
                {"I0", c.Iu0},
                {"d", c.d},
                {"X0", c.X0},
                {"regime", to_string(c.regime)},
                {"criticalBand", c.criticalBand},
                {"lambdaLower", opt(c.lambdaLower)},
                {"LambdaUpper", opt(c.LambdaUpper)}};
}

json to_json(const Outcome& o) {
    json j{{"kind", to_string(o.kind)}, {"cause", to_string(o.cause)}};
    switch (o.kind) {
        case Outcome::Kind::BlowUp:
            j["tEstimate"] = o.tEstimate;
            j["lastFiniteT"] = o.lastFiniteT;
            break;
        case Outcome::Kind::Extinct: j["tStar"] = o.tStar; break;
        default: j["tReached"] = o.tReached;
    }
    return j;
}

json to_json(const DecayReport& r) {
    return json{{"delta1", r.delta1},
                {"gamma", r.gamma},
                {"C", r.C},
                {"delta3", r.delta3},
                {"beta", num(r.beta)},
                {"alpha", num(r.alpha)},
                {"alphaTilde", num(r.alphaTilde)},
                {"G0", r.G0},
                {"polyMaxViolation", num(r.polyMaxViolation)},
                {"expMaxViolation", num(r.expMaxViolation)}};
}

json to_json(const LifespanReport& r) {
    return json{{"boundNegE", opt(r.boundNegE)},
                {"boundPosE", opt(r.boundPosE)},
                {"t0", opt(r.t0)},
                {"beta0Max", opt(r.beta0Max)},
                {"observedT", opt(r.observedT)}};
}

json to_json(const ConvergenceReport& r) {
    json samples = json::array();
    for (const auto& s : r.samples)
        samples.push_back(json{{"t", s.t},
                               {"dissipation", s.dissipation},
                               {"distZero", s.distZero},
                               {"distStar", num(s.distStar)},
                               {"selected", s.selected}});
    return json{{"limit", to_string(r.limit)},
                {"finalDistance", num(r.finalDistance)},
                {"samples", samples}};
}

Landscape compute_landscape(const ExperimentConfig& cfg, const Grid& g) {
    Landscape land;
    land.constants = estimate_embedding_constants(cfg.model, g, cfg.constants);
    land.curve = std::make_shared<DeltaCurveBuilder>(cfg.model, g, cfg.wells);
    return land;
}

Field make_initial(const ExperimentConfig& cfg, const Grid& g, double d) {
    const InitialSpec& in = cfg.initial;
    Field u;
    switch (in.shape) {
        case InitialShape::Sine: u = sine_mode(g, in.mode, in.amplitude); break;
        case InitialShape::Bump: u = polynomial_bump(g, in.amplitude); break;
        case InitialShape::Random: {
            std::mt19937_64 rng(cfg.seed);
            u = random_modes(g, rng, in.modes, in.amplitude);
            break;
        }
    }
    if (in.scale == InitialScaling::ToI) {
        const double ls = find_lambda_star(u, cfg.model, g).lambdaStar;
        u *= in.targetIPositive ? 0.5 * ls : 2.0 * ls;
    } else if (in.scale == InitialScaling::ToJ) {
        const double c = scale_to_energy(u, in.targetJFraction * d,
                                         in.branchAbove ? RayBranch::Above : RayBranch::Below,
                                         cfg.model, g);
        u *= c;
    }
    return u;
}

SimulationProduct simulate(const ExperimentConfig& cfg, const Grid& g, const Landscape& land) {
    SimulationProduct prod;
    const auto t0 = std::chrono::steady_clock::now();
    const Field u0 = make_initial(cfg, g, land.d());
    prod.classification = classify(u0, cfg.model, g, land.context());

    StepperConfig sc = cfg.stepper;
    sc.snapshotTimes = geometric_snapshot_times(cfg.output.snapshotT0, sc.tEnd);
    prod.run = run(u0, cfg.model, g, sc);
    const double t_run = seconds_since(t0);

    const SimulationTrace& tr = prod.run.trace;
    const Outcome& out = prod.run.outcome;
    const Classification& cls = prod.classification;

    json s = header(cfg, "simulate");
    s["grid"] = json{{"N", g.size()}, {"h", g.spacing()}, {"L", g.length()}};
    s["constants"] = to_json(land.constants);
    s["d"] = land.d();
    s["classification"] = to_json(cls);
    s["outcome"] = to_json(out);
    s["steps"] = tr.records.size() - 1;
    s["rejectedSteps"] = tr.rejected;
    s["switchedToImplicit"] = tr.switchedToImplicit;
    s["energyResidual"] = discrete_energy_residual(tr);

    s["decay"] = nullptr;
    if (cls.regime == Regime::SubcriticalGlobal && cls.Ju0 > 0.0 && cls.Ju0 < land.d()) {
        DeltaCurveBuilder curve = *land.curve;  // private copy; the builder caches
        const DeltaRoots roots = delta_roots(cls.Ju0, curve);
        json dj = to_json(check_decay_bounds(tr, cls, land.constants, roots.delta1, cfg.model));
        dj["delta2"] = roots.delta2;
        dj["lowerRootFound"] = roots.lowerRootFound;
        s["decay"] = dj;
    }
    s["lifespan"] = nullptr;
    if (out.kind == Outcome::Kind::BlowUp) s["lifespan"] = to_json(lifespan_bounds(tr, out, cfg.model));

    s["convergence"] = nullptr;
    if (out.kind == Outcome::Kind::GlobalDecay || out.kind == Outcome::Kind::Undecided) {
        GroundStateOptions go;
        go.well = cfg.wells;
        const GroundState gs = polish_ground_state(land.curve->ground(), cfg.model, g, go);
        s["convergence"] = to_json(convergence_track(tr, &gs, cfg.model, g));
    }
    s["timings"] = json{{"runSeconds", t_run}, {"totalSeconds", seconds_since(t0)}};
    prod.summary = std::move(s);
    return prod;
}

std::vector<SweepCell> run_sweep(const ExperimentConfig& cfg) {
    std::vector<SweepCell> cells;
    std::vector<ExperimentConfig> configs;
    const std::vector<double> v1 = cfg.axis1 ? cfg.axis1->values() : std::vector<double>{0.0};
    const std::vector<double> v2 = cfg.axis2 ? cfg.axis2->values() : std::vector<double>{0.0};
    for (double a : v1) {
        for (double b : v2) {
            ExperimentConfig c = cfg;
            if (cfg.axis1) set_config_value(c, cfg.axis1->key, a);
            if (cfg.axis2) set_config_value(c, cfg.axis2->key, b);
            SweepCell cell;
            cell.axis1 = cfg.axis1 ? a : std::nan("");
            cell.axis2 = cfg.axis2 ? b : std::nan("");
            cell.hasAxis2 = cfg.axis2.has_value();
            cells.push_back(cell);
            configs.push_back(std::move(c));
        }
    }

    // one landscape per distinct (model, grid, optimiser) setting
    std::map<std::string, std::size_t> slot_of;
    std::vector<std::size_t> cell_slot;
    std::vector<std::size_t> slot_cell;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const std::string key = landscape_key(configs[i]);
        auto [it, inserted] = slot_of.emplace(key, slot_cell.size());
        if (inserted) slot_cell.push_back(i);
        cell_slot.push_back(it->second);
    }
    std::vector<Landscape> lands(slot_cell.size());
    parallel_for(slot_cell.size(), cfg.threads, [&](std::size_t s) {
        const ExperimentConfig& c = configs[slot_cell[s]];
        lands[s] = compute_landscape(c, Grid(c.gridN, c.model.length));
    });

    parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
        const ExperimentConfig& c = configs[i];
        const Grid g(c.gridN, c.model.length);
        SimulationProduct prod = simulate(c, g, lands[cell_slot[i]]);
        cells[i].classification = prod.classification;
        cells[i].outcome = prod.run.outcome;
        prod.summary["command"] = "sweep-cell";
        cells[i].summary = std::move(prod.summary);
    });
    return cells;
}

void write_phase_map_csv(std::ostream& os, const std::vector<SweepCell>& cells) {
    os << kPhaseMapCsvHeader << '\n';
    char buf[160];
    auto field = [&](double v) -> std::string {
        if (std::isnan(v)) return "";
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    };
    for (const auto& c : cells) {
        os << field(c.axis1) << ',' << field(c.axis2) << ',' << field(c.classification.Ju0) << ','
           << field(c.classification.Iu0) << ',' << field(c.classification.d) << ','
           << to_string(c.classification.regime) << ',' << to_string(c.outcome.kind) << ','
           << (c.outcome.kind == Outcome::Kind::BlowUp ? field(c.outcome.tEstimate) : "") << '\n';
    }
}

json cmd_constants(const ExperimentConfig& cfg, const std::string& outDir) {
    const fs::path dir = prepare_dir(outDir);
    const Grid g(cfg.gridN, cfg.model.length);
    const EmbeddingConstants c = estimate_embedding_constants(cfg.model, g, cfg.constants);
    json j = header(cfg, "constants");
    j["constants"] = to_json(c);
    j["gamma"] = decay_gamma(c, cfg.model);
    j["r_of_delta_1"] = r_of_delta(1.0, c, cfg.model);
    write_json(dir / "constants.json", j);
    return j;
}

json cmd_well(const ExperimentConfig& cfg, const std::string& outDir) {
    const fs::path dir = prepare_dir(outDir);
    const Grid g(cfg.gridN, cfg.model.length);
    DeltaCurveBuilder builder(cfg.model, g, cfg.wells);
    const DeltaCurve curve = builder.curve(cfg.output.deltas);
    const WellDepth& w = builder.ground();

    json j = header(cfg, "well");
    j["d"] = w.d;
    j["restarts"] = w.restarts;
    j["converged"] = w.converged;
    j["history"] = w.history;
    const EnergyBreakdown e = eval_energy(w.minimizer, cfg.model, g);
    j["minimizer"] = json{{"J", e.J}, {"I", e.I}, {"gradNormP", std::pow(e.gradP, 1.0 / cfg.model.p)}};
    json pts = json::array();
    for (std::size_t i = 0; i < curve.deltas.size(); ++i)
        pts.push_back(json{{"delta", curve.deltas[i]}, {"d", curve.values[i]}});
    j["deltaCurve"] = pts;
    write_json(dir / "well.json", j);

    std::ofstream csv(dir / "delta_curve.csv");
    csv << "delta,d\n";
    char buf[96];
    for (std::size_t i = 0; i < curve.deltas.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", curve.deltas[i], curve.values[i]);
        csv << buf;
    }
    return j;
}

json cmd_ground_state(const ExperimentConfig& cfg, const std::string& outDir) {
    const fs::path dir = prepare_dir(outDir);
    const Grid g(cfg.gridN, cfg.model.length);
    GroundStateOptions go;
    go.well = cfg.wells;
    const GroundState gs = ground_state(cfg.model, g, go);
    json j = header(cfg, "ground-state");
    j["JStar"] = gs.JStar;
    j["IStar"] = gs.IStar;
    j["d"] = gs.d;
    j["stationarityResidual"] = gs.stationarityResidual;
    j["newtonSteps"] = gs.newtonSteps;
    j["converged"] = gs.converged;
    write_json(dir / "ground_state.json", j);

    std::ofstream csv(dir / "ground_state.csv");
    csv << "x,u\n";
    char buf[96];
    for (int i = 0; i < g.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", g.node(i), gs.uStar[i]);
        csv << buf;
    }
    return j;
}

json cmd_classify(const ExperimentConfig& cfg, const std::string& outDir) {
    const fs::path dir = prepare_dir(outDir);
    const Grid g(cfg.gridN, cfg.model.length);
    const Landscape land = compute_landscape(cfg, g);
    const Field u0 = make_initial(cfg, g, land.d());
    json j = header(cfg, "classify");
    j["constants"] = to_json(land.constants);
    j["classification"] = to_json(classify(u0, cfg.model, g, land.context()));
    write_json(dir / "classification.json", j);
    return j;
}

json cmd_simulate(const ExperimentConfig& cfg, const std::string& outDir) {
    const fs::path dir = prepare_dir(outDir);
    const Grid g(cfg.gridN, cfg.model.length);
    const Landscape land = compute_landscape(cfg, g);
    SimulationProduct prod = simulate(cfg, g, land);
    {
        std::ofstream csv(dir / "trace.csv");
        if (!csv) throw Error("cannot write " + (dir / "trace.csv").string());
        write_trace_csv(csv, prod.run.trace, cfg.output.traceStride);
    }
    write_json(dir / "summary.json", prod.summary);
    return prod.summary;
}

json cmd_sweep(const ExperimentConfig& cfg, const std::string& outDir) {
    const fs::path dir = prepare_dir(outDir);
    const std::vector<SweepCell> cells = run_sweep(cfg);
    {
        std::ofstream csv(dir / "phase_map.csv");
        if (!csv) throw Error("cannot write " + (dir / "phase_map.csv").string());
        write_phase_map_csv(csv, cells);
    }
    json j = header(cfg, "sweep");
    json arr = json::array();
    for (const auto& c : cells) {
        json cj = c.summary;
        cj["axis1"] = num(c.axis1);
        cj["axis2"] = num(c.axis2);
        arr.push_back(std::move(cj));
    }
    j["cells"] = std::move(arr);
    write_json(dir / "sweep_summary.json", j);
    return j;
}

}  // namespace kirchlog
