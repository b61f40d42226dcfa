#include "kirchlog/evolution.hpp"

#include "kirchlog/energy.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace kirchlog {

std::string to_string(Scheme s) {
    return s == Scheme::LaggedImplicit ? "lagged" : "implicit";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "lagged") return Scheme::LaggedImplicit;
    if (s == "implicit") return Scheme::FullyImplicit;
    throw ParameterError("unknown scheme '" + s + "' (expected lagged or implicit)");
}

std::string to_string(Outcome::Kind k) {
    switch (k) {
        case Outcome::Kind::GlobalDecay: return "GlobalDecay";
        case Outcome::Kind::BlowUp: return "BlowUp";
        case Outcome::Kind::Extinct: return "Extinct";
        case Outcome::Kind::Undecided: return "Undecided";
    }
    return "?";
}

std::string to_string(Outcome::Cause c) {
    switch (c) {
        case Outcome::Cause::None: return "none";
        case Outcome::Cause::NormThreshold: return "norm-threshold";
        case Outcome::Cause::StepUnderflow: return "step-underflow";
    }
    return "?";
}

void StepperConfig::validate() const {
    if (!(dtMin > 0.0) || !(dtMin <= dt0) || !(dt0 <= dtMax))
        throw ParameterError("stepper needs 0 < dt_min <= dt0 <= dt_max");
    if (!(blowupNormThreshold > 0.0) || !(extinctionThreshold > 0.0))
        throw ParameterError("blow-up and extinction thresholds must be positive");
    if (!(safety > 0.0) || safety > 1.0) throw ParameterError("safety factor must lie in (0, 1]");
    if (!(tEnd > 0.0)) throw ParameterError("t_end must be positive");
    if (!(nonlinearSolverTol > 0.0) || maxNewtonIters < 1)
        throw ParameterError("Newton tolerance and iteration limit must be positive");
    if (!(energyRtol > 0.0) || energyAtol < 0.0)
        throw ParameterError("energy tolerances must be positive");
}

Stepper::Stepper(const ModelParams& params, const Grid& g)
    : params_(params), grid_(g), op_(g, 1.0, static_cast<double>(params.k)) {
    params_.validate();
}

double Stepper::pseudo_norm_sq(const Field& v) const {
    return grid_.spacing() * v.dot(op_.apply(v));
}

Field Stepper::step(const Field& u, double dt, Scheme scheme, const StepperConfig& cfg) const {
    grid_.check(u);
    const Field lagged = u + op_.solve(dt * stationary_residual(u, params_, grid_));
    if (scheme == Scheme::LaggedImplicit) return lagged;

    const Eigen::MatrixXd a = op_.dense();
    auto residual = [&](const Field& v) -> Field {
        return op_.apply(v - u) - dt * stationary_residual(v, params_, grid_);
    };
    auto scale = [&](const Field& v) {
        return std::max(op_.apply(v - u).cwiseAbs().maxCoeff(),
                        dt * stationary_residual(v, params_, grid_).cwiseAbs().maxCoeff());
    };

    Field v = lagged;
    Field r = residual(v);
    if (!r.allFinite()) v = u, r = residual(v);
    for (int it = 0; it < cfg.maxNewtonIters; ++it) {
        const double rn = r.cwiseAbs().maxCoeff();
        if (rn <= cfg.nonlinearSolverTol * std::max(1e-300, scale(v))) return v;
        const Eigen::MatrixXd jac = a - dt * stationary_jacobian(v, params_, grid_);
        const Field dv = jac.partialPivLu().solve(r);
        double damp = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 20; ++ls) {
            const Field trial = v - damp * dv;
            const Field rt = residual(trial);
            if (rt.allFinite() && rt.cwiseAbs().maxCoeff() < rn) {
                v = trial;
                r = rt;
                improved = true;
                break;
            }
            damp *= 0.5;
        }
        if (!improved) break;
    }
    if (r.cwiseAbs().maxCoeff() <= cfg.nonlinearSolverTol * std::max(1e-300, scale(v))) return v;
    throw StepRejected("Newton iteration did not converge");
}

Field step(const Field& u, double dt, const ModelParams& params, const Grid& g,
           const StepperConfig& cfg) {
    if (!(dt > 0.0)) throw ParameterError("dt must be positive");
    return Stepper(params, g).step(u, dt, cfg.scheme, cfg);
}

namespace {

TraceRecord make_record(double t, double dt, const Field& u, const ModelParams& params,
                        const Grid& g) {
    const EnergyBreakdown e = eval_energy(u, params, g);
    TraceRecord r;
    r.t = t;
    r.dt = dt;
    r.J = e.J;
    r.I = e.I;
    r.norm2sq = power_integral(u, g, 2.0);
    r.gradNorm2sq = grad_power_integral(u, g, 2.0);
    r.gradNormP = std::pow(e.gradP, 1.0 / params.p);
    r.normQ1 = std::pow(e.normQ1, 1.0 / (params.q + 1.0));
    return r;
}

double pseudo_x(const TraceRecord& r, const ModelParams& params) {
    return r.norm2sq + params.k * r.gradNorm2sq;
}

}  // namespace

RunResult run(const Field& u0, const ModelParams& params, const Grid& g, const StepperConfig& cfg) {
    params.validate();
    cfg.validate();
    g.check(u0);
    g.check_finite(u0);

    const Stepper stepper(params, g);
    RunResult res;
    SimulationTrace& tr = res.trace;
    Outcome& out = res.outcome;

    std::vector<double> snaps = cfg.snapshotTimes;
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;

    Field u = u0;
    double t = 0.0;
    tr.records.push_back(make_record(0.0, 0.0, u, params, g));
    auto take_snapshots = [&] {
        while (next_snap < snaps.size() && snaps[next_snap] <= t) {
            tr.snapshots.push_back({t, u});
            ++next_snap;
        }
    };
    take_snapshots();

    Scheme scheme = cfg.scheme;
    double dt = cfg.dt0;
    int consecutive = 0;

    auto finish_blowup = [&](Outcome::Cause cause) {
        out.kind = Outcome::Kind::BlowUp;
        out.cause = cause;
        out.lastFiniteT = t;
        try {
            out.tEstimate = estimate_blowup_time(tr, params);
        } catch (const EstimationError&) {
            out.tEstimate = t;
        }
    };

    bool done = false;
    for (long n = 0; n < cfg.maxSteps && !done; ++n) {
        if (t >= cfg.tEnd) break;
        double h = dt;
        if (t + h >= cfg.tEnd * (1.0 - 1e-14)) h = cfg.tEnd - t;

        bool accepted = false;
        Field v;
        double residual = 0.0;
        double diss = 0.0;
        double allow = 0.0;
        try {
            v = stepper.step(u, h, scheme, cfg);
        } catch (const StepRejected&) {
            v.resize(0);
        }
        const TraceRecord& prev = tr.records.back();
        TraceRecord rec;
        if (v.size() == u.size() && v.allFinite()) {
            rec = make_record(t + h, h, v, params, g);
            diss = stepper.pseudo_norm_sq(v - u) / (h * h);
            residual = rec.J - prev.J + h * diss;
            allow =
                cfg.energyRtol * h * diss + cfg.energyAtol * std::max(1.0, std::abs(prev.J));
            accepted = std::isfinite(rec.J) && std::isfinite(diss) && std::abs(residual) <= allow;
        }

        if (!accepted) {
            ++tr.rejected;
            ++consecutive;
            if (consecutive >= cfg.implicitAfterRejections && scheme == Scheme::LaggedImplicit) {
                scheme = Scheme::FullyImplicit;
                tr.switchedToImplicit = true;
            }
            dt = 0.5 * h;
            if (dt < cfg.dtMin) {
                finish_blowup(Outcome::Cause::StepUnderflow);
                done = true;
            }
            continue;
        }

        consecutive = 0;
        rec.dissipation = diss;
        rec.energyResidual = residual;
        const double prev_norm = std::sqrt(prev.norm2sq);
        u = std::move(v);
        t = rec.t;
        tr.records.push_back(rec);
        take_snapshots();

        const double norm = std::sqrt(rec.norm2sq);
        if (norm > cfg.blowupNormThreshold) {
            finish_blowup(Outcome::Cause::NormThreshold);
            done = true;
            break;
        }
        if (prev_norm >= cfg.extinctionThreshold && norm < cfg.extinctionThreshold) {
            out.kind = Outcome::Kind::Extinct;
            out.tStar = t;
            done = true;
            break;
        }

        // aim for half the admissible residual; roundoff-level residuals let dt grow
        const double err = allow > 0.0 ? std::abs(residual) / allow : 0.0;
        double factor = err > 0.0 ? cfg.safety * std::sqrt(0.5 / err) : 2.0;
        factor = std::clamp(factor, 0.5, 2.0);
        dt = std::clamp(std::max(dt, h) * factor, cfg.dtMin, cfg.dtMax);
    }

    if (!done) {
        out.tReached = t;
        const TraceRecord& first = tr.records.front();
        const TraceRecord& last = tr.records.back();
        const bool zero = u.cwiseAbs().maxCoeff() == 0.0;
        const bool decayed = last.I > 0.0 &&
                             pseudo_x(last, params) <= cfg.decayFraction * pseudo_x(first, params);
        out.kind = (zero || decayed) && t >= cfg.tEnd * (1.0 - 1e-12) ? Outcome::Kind::GlobalDecay
                                                                        : Outcome::Kind::Undecided;
    }
    tr.snapshots.push_back({t, u});
    tr.final = u;
    return res;
}

double discrete_energy_residual(const SimulationTrace& trace) {
    double worst = 0.0;
    for (std::size_t i = 1; i < trace.records.size(); ++i)
        worst = std::max(worst, trace.records[i].energyResidual);
    return worst;
}

double estimate_blowup_time(const SimulationTrace& trace, const ModelParams& params) {
    constexpr std::size_t kTail = 8;
    std::vector<std::pair<double, double>> pts;
    for (auto it = trace.records.rbegin(); it != trace.records.rend() && pts.size() < kTail; ++it) {
        const double x = pseudo_x(*it, params);
        const double y = std::pow(x, (1.0 - params.q) / 2.0);
        if (std::isfinite(y) && x > 0.0) pts.emplace_back(it->t, y);
    }
    const double last_t = trace.records.empty() ? 0.0 : trace.records.back().t;
    if (pts.size() < 3)
        throw EstimationError("too few trace points to extrapolate the blow-up time", last_t);

    // least squares y = c0 + c1 t, centred for conditioning
    double tm = 0.0, ym = 0.0;
    for (const auto& [t, y] : pts) tm += t, ym += y;
    tm /= pts.size();
    ym /= pts.size();
    double stt = 0.0, sty = 0.0;
    for (const auto& [t, y] : pts) {
        stt += (t - tm) * (t - tm);
        sty += (t - tm) * (y - ym);
    }
    if (!(stt > 0.0)) throw EstimationError("degenerate time samples in the blow-up tail", last_t);
    const double slope = sty / stt;
    if (!(slope < 0.0)) return last_t;
    const double root = tm - ym / slope;
    return std::max(root, last_t);
}

void write_trace_csv(std::ostream& os, const SimulationTrace& trace, int stride) {
    stride = std::max(1, stride);
    os << kTraceCsvHeader << '\n';
    char buf[512];
    const std::size_t n = trace.records.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (i % stride != 0 && i + 1 != n) continue;
        const TraceRecord& r = trace.records[i];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.dt,
                      r.J, r.I, r.norm2sq, r.gradNormP, r.dissipation);
        os << buf;
    }
}

}  // namespace kirchlog
