// Acceptance run: one line per criterion, nonzero exit if any fails.

#include "kirchlog/analysis.hpp"
#include "kirchlog/energy.hpp"
#include "kirchlog/experiment.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace kirchlog;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double relerr(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Desk landscape shared by several criteria.
struct DeskLandscape {
    ModelParams m = kt::desk_params();
    Grid g{kt::kDeskN, 1.0};
    EmbeddingConstants constants;
    std::shared_ptr<DeltaCurveBuilder> curve;

    DeskLandscape() {
        constants = estimate_embedding_constants(m, g);
        curve = std::make_shared<DeltaCurveBuilder>(m, g);
    }
    double d() const { return curve->depth(); }
};

const DeskLandscape& desk() {
    static const DeskLandscape land;
    return land;
}

// ---- 1 ---------------------------------------------------------------------

Verdict oracle_equivalence() {
    Verdict v;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> P(0.1, 4.0);
    std::uniform_real_distribution<double> D(0.05, 5.0);
    double worst = 0.0, worst_identity = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        ModelParams m;
        m.a = P(rng);
        m.b = P(rng);
        m.k = trial % 2;
        m.p = 2.0 + (trial % 5) * 0.25;
        m.q = 2.0 * m.p - 1.0 + P(rng);
        m.length = 0.5 + P(rng);
        Grid g(4, m.length);
        const Field u = kt::rough_field(4, rng, 2.0);
        const double delta = D(rng);
        const EnergyBreakdown e = eval_energy(u, m, g);
        const auto o = kt::oracle_energy(kt::to_std(u), m.length, m.a, m.b, m.p, m.q);
        const double oid = kt::oracle_I_delta(kt::to_std(u), m.length, m.a, m.b, m.p, m.q, delta);
        worst = std::max({worst, relerr(e.J, o.J), relerr(e.I, o.I),
                          relerr(eval_I_delta(u, delta, m, g), oid)});
        worst_identity = std::max(worst_identity, relerr(energy_from_nehari_identity(e, m), e.J));
    }
    v.require(worst <= 1e-12, "J/I/I_delta oracle mismatch");
    v.require(worst_identity <= 1e-12, "energy identity residual");
    v.note("max oracle err " + fmt("%.2e", worst) + ", identity " + fmt("%.2e", worst_identity));
    return v;
}

// ---- 2 ---------------------------------------------------------------------

Verdict fibering_suite() {
    Verdict v;
    const ModelParams m = kt::desk_params();
    Grid g(kt::kDeskN, 1.0);
    std::mt19937_64 rng(202);
    double worst_nehari = 0.0, worst_scale = 0.0;
    int unimodal = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const Field u = kt::smooth_field(kt::kDeskN, 1.0, rng, 0.05, 50.0);
        const double ls = find_lambda_star(u, m, g).lambdaStar;
        const EnergyBreakdown at = eval_energy(Field(ls * u), m, g);
        worst_nehari = std::max(worst_nehari, std::abs(at.I) / (m.a * at.gradP + m.b * at.grad2P));
        for (double c : {0.1, 3.0, 10.0})
            worst_scale = std::max(worst_scale,
                                   std::abs(find_lambda_star(Field(c * u), m, g).lambdaStar * c - ls) / ls);

        // scan J(lambda u) on 1e4 log-spaced points from the oracle integrals
        const auto o = kt::oracle_energy(kt::to_std(u), 1.0, m.a, m.b, m.p, m.q);
        auto J = [&](double l) {
            const double q1 = m.q + 1.0;
            const double lp = std::pow(l, m.p), lq = std::pow(l, q1);
            return m.a / m.p * lp * o.G + m.b / (2 * m.p) * lp * lp * o.G * o.G -
                   lq * (o.Lg + std::log(l) * o.Q) / q1 + lq * o.Q / (q1 * q1);
        };
        const int n = 10000;
        const double lo = std::log(ls) - std::log(100.0), hi = std::log(ls) + std::log(100.0);
        const double step = (hi - lo) / (n - 1);
        std::vector<double> vals(n);
        int arg = 0;
        for (int i = 0; i < n; ++i) {
            vals[i] = J(std::exp(lo + i * step));
            if (vals[i] > vals[arg]) arg = i;
        }
        bool ok = std::abs(lo + arg * step - std::log(ls)) <= step;
        const double slack = 1e-13 * std::abs(vals[arg]);
        for (int i = 1; i <= arg; ++i) ok = ok && vals[i] >= vals[i - 1] - slack;
        for (int i = arg + 1; i < n; ++i) ok = ok && vals[i] <= vals[i - 1] + slack;
        // the closed-form ray agrees with direct evaluation at a few scales
        for (double f : {0.3, 1.0, 2.0})
            ok = ok && relerr(J(f * ls), eval_energy(Field(f * ls * u), m, g).J) <= 1e-10;
        unimodal += ok ? 1 : 0;
    }
    v.require(worst_nehari <= 1e-8, "|I(lambda* u)| relative");
    v.require(worst_scale <= 1e-8, "lambda*(cu) c = lambda*(u)");
    v.require(unimodal == 50, "unique interior maximum on the scan");
    v.note("max |I| rel " + fmt("%.2e", worst_nehari) + ", scale err " + fmt("%.2e", worst_scale) +
           ", unimodal " + std::to_string(unimodal) + "/50");
    return v;
}

// ---- 3 ---------------------------------------------------------------------

Verdict well_depth_structure() {
    Verdict v;
    const DeskLandscape& land = desk();
    DeltaCurveBuilder builder = *land.curve;
    const std::vector<double> deltas{0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
    const DeltaCurve c = builder.curve(deltas);
    double worst = 0.0;
    std::size_t peak = 0;
    for (std::size_t i = 0; i < c.values.size(); ++i)
        if (c.values[i] > c.values[peak]) peak = i;
    for (std::size_t i = 1; i < c.values.size(); ++i) {
        const double prev = c.values[i - 1], cur = c.values[i];
        // rise up to delta = 1, fall afterwards
        const double viol = deltas[i] <= 1.0 ? prev - cur : cur - prev;
        worst = std::max(worst, viol / std::abs(prev));
    }
    v.require(deltas[peak] == 1.0, "maximum at delta = 1");
    v.require(worst <= 0.01, "monotonicity violation above 1%");

    WellOptions other;
    other.seed = 7;
    const double d7 = compute_well_depth(1.0, land.m, land.g, other).d;
    const double spread = std::abs(d7 - land.d()) / land.d();
    v.require(spread <= 0.01, "seeds 1 and 7 disagree on d");
    std::string curve;
    for (std::size_t i = 0; i < deltas.size(); ++i)
        curve += (i ? " " : "") + fmt("%.3g", c.values[i]);
    v.note("d(delta) = [" + curve + "], worst violation " + fmt("%.1e", std::max(0.0, worst)) +
           ", seed spread " + fmt("%.1e", spread));
    return v;
}

// ---- 4, 5, 9 share the decaying run ------------------------------------------

struct DecayingRun {
    RunResult run;
    Classification cls;
    DeltaRoots roots;
    double seconds = 0.0;
};

const DecayingRun& decaying_run() {
    static const DecayingRun r = [] {
        const auto t0 = std::chrono::steady_clock::now();
        const DeskLandscape& land = desk();
        DecayingRun out;
        const Field u0 = kt::sine(kt::kDeskN, 1.0, 0.1);
        out.cls = classify(u0, land.m, land.g, {land.d(), land.constants});
        StepperConfig cfg;
        cfg.dt0 = 1e-4;
        cfg.dtMax = 1e-4;
        cfg.tEnd = 18.0;
        cfg.snapshotTimes = geometric_snapshot_times(0.25, cfg.tEnd);
        out.run = run(u0, land.m, land.g, cfg);
        DeltaCurveBuilder builder = *land.curve;
        out.roots = delta_roots(out.cls.Ju0, builder);
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }();
    return r;
}

Verdict threshold_reproduction() {
    Verdict v;
    const DeskLandscape& land = desk();

    const DecayingRun& dr = decaying_run();
    const double residual = discrete_energy_residual(dr.run.trace);
    bool nonincreasing = true;
    const auto& recs = dr.run.trace.records;
    for (std::size_t i = 1; i < recs.size(); ++i)
        nonincreasing = nonincreasing && recs[i].J <= recs[i - 1].J + 1e-4;
    v.require(dr.cls.regime == Regime::SubcriticalGlobal, "0.1 sin is not SubcriticalGlobal");
    v.require(dr.run.outcome.kind == Outcome::Kind::GlobalDecay, "0.1 sin did not decay");
    v.require(residual <= 1e-4, "energy-identity residual above 1e-4");
    v.require(nonincreasing, "J increased along the trace");

    // amplitude sweep through the library's sweep driver
    ExperimentConfig cfg;
    cfg.stepper.tEnd = 4.0;
    cfg.output.traceStride = 1000;
    SweepAxis axis;
    axis.key = "initial.amplitude";
    axis.lo = 0.5;
    axis.hi = 20.0;
    axis.count = 16;
    axis.logarithmic = true;
    cfg.axis1 = axis;
    const std::vector<SweepCell> cells = run_sweep(cfg);
    int agree = 0, checked = 0, transitions = 0;
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        if (c.classification.regime == Regime::SubcriticalGlobal) {
            ++checked;
            agree += c.outcome.kind == Outcome::Kind::GlobalDecay;
        } else if (c.classification.regime == Regime::SubcriticalBlowup) {
            ++checked;
            agree += c.outcome.kind == Outcome::Kind::BlowUp;
        }
        if (i > 0) {
            const bool was = cells[i - 1].outcome.kind == Outcome::Kind::BlowUp;
            const bool is = c.outcome.kind == Outcome::Kind::BlowUp;
            if (was != is) {
                ++transitions;
                lo = cells[i - 1].axis1;
                hi = c.axis1;
            }
        }
    }
    const double ls = find_lambda_star(kt::sine(kt::kDeskN, 1.0, 1.0), land.m, land.g).lambdaStar;
    v.require(agree == checked && checked > 0, "classifier and evolution disagree");
    v.require(transitions == 1, "expected a single decay/blow-up transition");
    v.require(lo <= ls && ls <= hi, "transition cell misses lambda*");
    v.note("residual " + fmt("%.2e", residual) + ", " + std::to_string(agree) + "/" +
           std::to_string(checked) + " subcritical cells agree, transition [" + fmt("%.4g", lo) +
           ", " + fmt("%.4g", hi) + "] vs lambda* " + fmt("%.4g", ls));
    return v;
}

Verdict decay_envelopes() {
    Verdict v;
    const DeskLandscape& land = desk();
    const DecayingRun& dr = decaying_run();
    const DecayReport r =
        check_decay_bounds(dr.run.trace, dr.cls, land.constants, dr.roots.delta1, land.m);
    v.require(r.polyMaxViolation <= 0.0, "polynomial envelope breached");
    v.require(r.expMaxViolation <= 1e-6 * r.G0, "exponential envelope breached");
    v.note("delta1 " + fmt("%.3g", r.delta1) + (dr.roots.lowerRootFound ? "" : " (no lower root)") +
           ", poly violation " + fmt("%.2e", r.polyMaxViolation) + ", exp violation " +
           fmt("%.2e", r.expMaxViolation) + " (G0 " + fmt("%.3g", r.G0) + ")");
    return v;
}

Verdict convergence_tracking() {
    Verdict v;
    const DeskLandscape& land = desk();
    const DecayingRun& dr = decaying_run();
    const GroundState gs = polish_ground_state(land.curve->ground(), land.m, land.g);
    const ConvergenceReport rep = convergence_track(dr.run.trace, &gs, land.m, land.g);
    std::vector<double> seq;
    for (const auto& s : rep.samples)
        if (s.selected) seq.push_back(s.distZero);
    bool monotone = seq.size() >= 3;
    for (std::size_t i = seq.size() / 2 + 1; i < seq.size(); ++i) monotone = monotone && seq[i] <= seq[i - 1];
    const double last = seq.empty() ? std::numeric_limits<double>::infinity() : seq.back();
    v.require(rep.limit == Limit::Zero, "limit is not the zero solution");
    v.require(monotone, "|u_x(t_k)|_p not decreasing beyond burn-in");
    v.require(last <= 1e-6, "final |u_x|_p above 1e-6");
    v.note(std::to_string(seq.size()) + " selected snapshots, final |u_x|_p " + fmt("%.2e", last));
    return v;
}

// ---- 6 ---------------------------------------------------------------------

Verdict lifespan_bounds_check() {
    Verdict v;
    const DeskLandscape& land = desk();
    const Field s = kt::sine(kt::kDeskN, 1.0, 1.0);
    StepperConfig cfg;
    cfg.tEnd = 1.0;
    const double slack = 10.0 * cfg.dtMin;

    const double cneg = scale_to_energy(s, -0.5 * land.d(), RayBranch::Above, land.m, land.g);
    const RunResult neg = run(Field(cneg * s), land.m, land.g, cfg);
    const LifespanReport rn = lifespan_bounds(neg.trace, neg.outcome, land.m);
    v.require(neg.outcome.kind == Outcome::Kind::BlowUp, "J0 < 0 run did not blow up");
    v.require(rn.boundNegE && rn.observedT && *rn.observedT <= *rn.boundNegE + slack,
              "negative-energy bound");

    const double cpos = scale_to_energy(s, 0.5 * land.d(), RayBranch::Above, land.m, land.g);
    const Field upos = cpos * s;
    const EnergyBreakdown e = eval_energy(upos, land.m, land.g);
    const RunResult pos = run(upos, land.m, land.g, cfg);
    const LifespanReport rp = lifespan_bounds(pos.trace, pos.outcome, land.m);
    v.require(e.J >= 0.0 && e.J <= land.d(), "second run is not in [0, d]");
    v.require(pos.outcome.kind == Outcome::Kind::BlowUp, "0 <= J0 <= d run did not blow up");
    v.require(rp.boundPosE.has_value(), "t0 condition never triggered");
    v.require(rp.boundPosE && rp.observedT && *rp.observedT <= *rp.boundPosE + slack,
              "positive-energy bound");
    v.note("J0<0: T " + fmt("%.3e", rn.observedT.value_or(NAN)) + " <= " +
           fmt("%.3e", rn.boundNegE.value_or(NAN)) + "; 0<=J0<=d: T " +
           fmt("%.3e", rp.observedT.value_or(NAN)) + " <= " + fmt("%.3e", rp.boundPosE.value_or(NAN)) +
           " (t0 " + fmt("%.2g", rp.t0.value_or(NAN)) + ")");
    return v;
}

// ---- 7 ---------------------------------------------------------------------

Verdict high_energy_consistency() {
    Verdict v;
    const DeskLandscape& land = desk();
    const ModelParams& m = land.m;
    const Grid& g = land.g;

    EmbeddingConstants unit;
    unit.S1 = 1.0;
    v.require(std::abs(f_of_y(1.0, unit, m) - 4.0 / 9.0) <= 1e-12, "f(1) = 4/9");

    const double d = land.d();
    const double kappa = kappa_root(d, land.constants, m);
    const double s = 2.0 * d;
    const double lower = lambda_s_lower_bound(s, d, land.constants, m);
    const double upper = Lambda_s_upper_bound(s, d, m);

    // Nehari samples: random smooth rays and perturbations of the well minimiser
    std::vector<Field> pts;
    std::mt19937_64 rng(707);
    for (int i = 0; i < 200; ++i) pts.push_back(nehari_project(kt::smooth_field(g.size(), 1.0, rng, 0.1, 10.0), m, g));
    const Field& w = land.curve->ground().minimizer;
    std::uniform_real_distribution<double> E(0.01, 0.5);
    for (int i = 0; i < 100; ++i) {
        const Field dir = kt::smooth_field(g.size(), 1.0, rng, 1.0, 1.0);
        pts.push_back(nehari_project(Field(w + E(rng) * w.cwiseAbs().maxCoeff() * dir), m, g));
    }
    pts.push_back(w);

    double min_grad = std::numeric_limits<double>::infinity();
    double min_x = min_grad, max_x = 0.0;
    int in_ns = 0;
    bool floor_ok = true, sandwich_ok = true;
    for (const Field& u : pts) {
        const double gp = grad_norm_r(u, g, m.p);
        min_grad = std::min(min_grad, gp);
        floor_ok = floor_ok && gp >= kappa - 1e-6;
        if (!(eval_energy(u, m, g).J < s)) continue;
        ++in_ns;
        const double x = power_integral(u, g, 2.0) + m.k * grad_power_integral(u, g, 2.0);
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        sandwich_ok = sandwich_ok && lower - 1e-6 <= x && x <= upper + 1e-6;
    }
    v.require(floor_ok, "Nehari point below the kappa floor");
    v.require(in_ns >= 50, "too few sampled points with J < 2d");
    v.require(sandwich_ok, "lambda_s / Lambda_s bounds do not sandwich");
    v.note("kappa " + fmt("%.4g", kappa) + " <= min |u_x|_p " + fmt("%.4g", min_grad) + "; " +
           std::to_string(in_ns) + " points with J < 2d, " + fmt("%.3g", lower) + " <= X in [" +
           fmt("%.4g", min_x) + ", " + fmt("%.4g", max_x) + "] <= " + fmt("%.4g", upper));
    return v;
}

// ---- 8 ---------------------------------------------------------------------

Verdict ground_state_check() {
    Verdict v;
    const DeskLandscape& land = desk();

    // desk coefficients: stationarity and the energy level
    const GroundState gs = polish_ground_state(land.curve->ground(), land.m, land.g);
    WellOptions other;
    other.seed = 7;
    const double d_indep = compute_well_depth(1.0, land.m, land.g, other).d;
    v.require(gs.stationarityResidual <= 1e-6, "desk residual above 1e-6");
    v.require(std::abs(gs.JStar - d_indep) <= 0.01 * d_indep, "desk J(u*) not within 1% of d");

    // weak coupling a = b = 0.01, where the flow near u* is slow enough to
    // observe over t in [0, 1]
    ModelParams weak = land.m;
    weak.a = 0.01;
    weak.b = 0.01;
    const GroundState gw = ground_state(weak, land.g);
    const double dw = compute_well_depth(1.0, weak, land.g, other).d;
    v.require(gw.stationarityResidual <= 1e-6, "weak residual above 1e-6");
    v.require(std::abs(gw.JStar - dw) <= 0.01 * dw, "weak J(u*) not within 1% of d");

    StepperConfig cfg;
    cfg.tEnd = 1.0;
    for (int i = 1; i < 100; ++i) cfg.snapshotTimes.push_back(0.01 * i);
    const RunResult r = run(gw.uStar, weak, land.g, cfg);
    double drift = 0.0;
    for (const auto& snap : r.trace.snapshots)
        drift = std::max(drift, grad_norm_r(Field(snap.u - gw.uStar), land.g, weak.p));
    v.require(r.outcome.kind != Outcome::Kind::BlowUp, "restart from u* blew up");
    v.require(r.trace.snapshots.back().t >= 1.0 - 1e-12, "restart did not reach t = 1");
    v.require(drift <= 1e-4, "drift above 1e-4");
    v.note("a=b=1: residual " + fmt("%.1e", gs.stationarityResidual) + ", J*/d " +
           fmt("%.6f", gs.JStar / d_indep) + "; a=b=0.01: residual " +
           fmt("%.1e", gw.stationarityResidual) + ", J*/d " + fmt("%.6f", gw.JStar / dw) +
           ", drift over [0,1] " + fmt("%.1e", drift));
    return v;
}

// ---- 10 --------------------------------------------------------------------

Verdict determinism() {
    Verdict v;
    ExperimentConfig cfg;
    cfg.initial.shape = InitialShape::Random;
    cfg.initial.amplitude = 2.0;
    cfg.seed = 42;
    cfg.wells.seed = 42;
    cfg.constants.seed = 42;
    cfg.stepper.tEnd = 0.5;
    const auto base = std::filesystem::temp_directory_path() / "kirchlog_acceptance_det";
    std::filesystem::remove_all(base);
    cmd_simulate(cfg, (base / "a").string());
    cmd_simulate(cfg, (base / "b").string());
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = slurp(base / "a" / "trace.csv");
    const std::string b = slurp(base / "b" / "trace.csv");
    v.require(!a.empty(), "empty trace");
    v.require(a == b, "trace CSVs differ");
    v.note(std::to_string(a.size()) + " bytes, identical");
    std::filesystem::remove_all(base);
    return v;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Verdict()> check;
        double budget;  // seconds; 0 when the runtime is counted elsewhere
    };
    const std::vector<Criterion> criteria{
        {1, "oracle equivalence", oracle_equivalence, 1},
        {2, "fibering suite", fibering_suite, 10},
        {3, "well-depth structure", well_depth_structure, 120},
        {4, "threshold reproduction", threshold_reproduction, 300},
        {5, "decay envelopes", decay_envelopes, 0},
        {6, "life-span bounds", lifespan_bounds_check, 120},
        {7, "high-energy consistency", high_energy_consistency, 60},
        {8, "ground state", ground_state_check, 120},
        {9, "convergence tracking", convergence_tracking, 0},
        {10, "determinism", determinism, 0},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget > 0.0 && secs > c.budget) {
            v.pass = false;
            v.detail += "; over the " + fmt("%.0f", c.budget) + " s budget";
        }
        std::printf("%s %2d %-24s %s [%.2fs]\n", v.pass ? "PASS" : "FAIL", c.id, c.name,
                    v.detail.c_str(), secs);
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
