#include "kirchlog/analysis.hpp"

#include "kirchlog/energy.hpp"
#include "kirchlog/errors.hpp"
#include "kirchlog/operators.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kirchlog {

std::string to_string(Regime r) {
    switch (r) {
        case Regime::SubcriticalGlobal: return "SubcriticalGlobal";
        case Regime::SubcriticalBlowup: return "SubcriticalBlowup";
        case Regime::CriticalGlobal: return "CriticalGlobal";
        case Regime::CriticalBlowup: return "CriticalBlowup";
        case Regime::HighEnergyGlobal: return "HighEnergyGlobal";
        case Regime::HighEnergyBlowup: return "HighEnergyBlowup";
        case Regime::HighEnergyUndetermined: return "HighEnergyUndetermined";
    }
    return "?";
}

bool predicts_global(Regime r) {
    return r == Regime::SubcriticalGlobal || r == Regime::CriticalGlobal ||
           r == Regime::HighEnergyGlobal;
}

bool predicts_blowup(Regime r) {
    return r == Regime::SubcriticalBlowup || r == Regime::CriticalBlowup ||
           r == Regime::HighEnergyBlowup;
}

bool in_critical_band(double J, double d) {
    return std::abs(J - d) <= std::max(1e-8, 1e-4 * std::abs(d));
}

Classification classify(const Field& u0, const ModelParams& params, const Grid& g,
                        const WellContext& wells) {
    g.check(u0);
    const EnergyBreakdown e = eval_energy(u0, params, g);
    Classification c;
    c.Ju0 = e.J;
    c.Iu0 = e.I;
    c.d = wells.d;
    c.X0 = power_integral(u0, g, 2.0) + params.k * grad_power_integral(u0, g, 2.0);

    if (u0.cwiseAbs().maxCoeff() == 0.0) {
        c.regime = Regime::SubcriticalGlobal;
        return c;
    }
    c.criticalBand = in_critical_band(e.J, wells.d);
    if (c.criticalBand) {
        c.regime = e.I >= 0.0 ? Regime::CriticalGlobal : Regime::CriticalBlowup;
    } else if (e.J < wells.d) {
        c.regime = e.I > 0.0 ? Regime::SubcriticalGlobal : Regime::SubcriticalBlowup;
    } else {
        c.regime = Regime::HighEnergyUndetermined;
        c.lambdaLower = lambda_s_lower_bound(e.J, wells.d, wells.constants, params);
        c.LambdaUpper = Lambda_s_upper_bound(e.J, wells.d, params);
        // lower bound on lambda_s and upper bound on Lambda_s keep both tests sound
        if (e.I > 0.0 && c.X0 <= *c.lambdaLower)
            c.regime = Regime::HighEnergyGlobal;
        else if (e.I < 0.0 && c.X0 >= *c.LambdaUpper)
            c.regime = Regime::HighEnergyBlowup;
    }
    return c;
}

double scale_to_energy(const Field& u, double target, RayBranch branch, const ModelParams& params,
                       const Grid& g) {
    const FiberingResult fr = find_lambda_star(u, params, g);
    const RayIntegrals ray = RayIntegrals::of(u, params, g);
    const double peak = ray.energy(fr.lambdaStar, params);
    if (!(target < peak)) {
        std::ostringstream msg;
        msg << "energy " << target << " is not below the ray maximum " << peak;
        throw DomainError(msg.str());
    }
    double lo, hi;
    if (branch == RayBranch::Below) {
        if (!(target > 0.0)) throw DomainError("the lower branch only reaches positive energies");
        lo = std::log(fr.lambdaStar) - 60.0;
        hi = std::log(fr.lambdaStar);
    } else {
        lo = std::log(fr.lambdaStar);
        hi = lo + 1.0;
        while (ray.energy(std::exp(hi), params) > target) {
            hi += 1.0;
            if (hi - lo > 60.0) throw DomainError("energy target not reached on the upper branch");
        }
    }
    // J(e^s u) - target changes sign once on [lo, hi]
    const bool increasing = branch == RayBranch::Below;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const bool above = ray.energy(std::exp(mid), params) > target;
        if (above == increasing)
            hi = mid;
        else
            lo = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

DecayReport check_decay_bounds(const SimulationTrace& trace, const Classification& cls,
                               const EmbeddingConstants& constants, double delta1,
                               const ModelParams& params) {
    if (trace.records.empty()) throw DomainError("empty trace");
    DecayReport r;
    const auto& recs = trace.records;
    const double p = params.p;
    const double q1 = params.q + 1.0;
    const double X0 = recs.front().norm2sq + params.k * recs.front().gradNorm2sq;
    r.polyBound.assign(recs.size(), 0.0);
    r.expBound.assign(recs.size(), 0.0);
    if (X0 == 0.0) return r;

    if (cls.regime != Regime::SubcriticalGlobal || !(cls.Ju0 > 0.0))
        throw DomainError("decay bounds need 0 < J(u0) < d and I(u0) > 0");
    if (!(delta1 >= 0.0) || !(delta1 < 1.0)) throw DomainError("delta1 must lie in [0, 1)");

    r.delta1 = delta1;
    r.gamma = decay_gamma(constants, params);
    r.C = 2.0 * (1.0 - delta1) * (p - 1.0) * r.gamma / constants.Kp;
    r.delta3 = 0.5 * (1.0 + delta1);
    r.beta = std::pow(p * q1 * cls.Ju0 / (params.a * (q1 - p)), (q1 - p) / p);
    r.alpha = 4.0 * params.a * p * q1 * q1 * (1.0 - r.delta3) /
              (params.a * q1 * (3.0 * q1 - 2.0 * p - 2.0 * p * r.delta3) +
               2.0 * p * std::pow(constants.S1, q1) * r.beta);
    r.G0 = cls.Ju0 + X0;

    r.alphaTilde = 0.0;
    for (const auto& rec : recs) {
        if (!(rec.J > 0.0)) continue;
        const double G = rec.J + rec.norm2sq + params.k * rec.gradNorm2sq;
        r.alphaTilde = std::max(r.alphaTilde, G / rec.J);
    }
    if (!(r.alphaTilde > 0.0)) throw DomainError("trace has no record with J > 0");

    r.polyMaxViolation = -std::numeric_limits<double>::infinity();
    r.expMaxViolation = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& rec = recs[i];
        const double X = rec.norm2sq + params.k * rec.gradNorm2sq;
        r.polyBound[i] =
            rec.t == 0.0 ? X0 : std::pow(std::pow(X0, 1.0 - p) + r.C * rec.t, -1.0 / (p - 1.0));
        r.expBound[i] = r.G0 * std::exp(-(r.alpha / r.alphaTilde) * rec.t);
        r.polyMaxViolation = std::max(r.polyMaxViolation, X - r.polyBound[i]);
        r.expMaxViolation = std::max(r.expMaxViolation, rec.J - r.expBound[i]);
    }
    return r;
}

LifespanReport lifespan_bounds(const SimulationTrace& trace, const Outcome& outcome,
                               const ModelParams& params) {
    if (trace.records.empty()) throw DomainError("empty trace");
    LifespanReport r;
    const auto& recs = trace.records;
    const double p = params.p;
    const double q = params.q;
    const double q1 = q + 1.0;
    const double J0 = recs.front().J;
    const double X0 = recs.front().norm2sq + params.k * recs.front().gradNorm2sq;
    if (outcome.kind == Outcome::Kind::BlowUp) r.observedT = outcome.tEstimate;

    if (J0 < 0.0) r.boundNegE = X0 / ((1.0 - q * q) * J0);

    // right-hand side of the t0 condition along the trace, then its suffix minimum
    std::vector<double> rhs(recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const double G = std::pow(recs[i].gradNormP, p);
        const double Q = std::pow(recs[i].normQ1, q1);
        rhs[i] = 2.0 * params.a * (q1 - p) / p * G + params.b * (q1 - 2.0 * p) / p * G * G +
                 2.0 / q1 * Q;
    }
    double suffix = std::numeric_limits<double>::infinity();
    std::vector<double> suffix_min(recs.size());
    for (std::size_t i = recs.size(); i-- > 0;) {
        suffix = std::min(suffix, rhs[i]);
        suffix_min[i] = suffix;
    }
    for (std::size_t i = 0; i < recs.size(); ++i) {
        if (!(2.0 * q1 * J0 < suffix_min[i])) continue;
        const double G = std::pow(recs[i].gradNormP, p);
        const double Q = std::pow(recs[i].normQ1, q1);
        const double beta = params.a * (q1 - p) / (p * q1) * G +
                            params.b * (q1 - 2.0 * p) / (2.0 * p * q1) * G * G + Q / (q1 * q1) -
                            recs[i].J;
        if (!(beta > 0.0)) continue;
        r.t0 = recs[i].t;
        r.beta0Max = beta;
        r.boundPosE = 4.0 * X0 / ((q - 1.0) * (q - 1.0) * beta) + recs[i].t;
        break;
    }
    return r;
}

double stationarity_residual(const Field& u, const ModelParams& params, const Grid& g) {
    const SpdOperator stiff(g, 0.0, 1.0);
    return dual_norm(stationary_residual(u, params, g), g, stiff);
}

GroundState polish_ground_state(const WellDepth& well, const ModelParams& params, const Grid& g,
                                const GroundStateOptions& opts) {
    const SpdOperator stiff(g, 0.0, 1.0);
    auto res_norm = [&](const Field& v) {
        return dual_norm(stationary_residual(v, params, g), g, stiff);
    };
    GroundState gs;
    gs.d = well.d;
    Field u = well.minimizer;
    double rn = res_norm(u);
    // run to roundoff: a restarted evolution amplifies whatever residual is left
    for (int it = 0; it < opts.maxNewtonIters; ++it) {
        const Field r = stationary_residual(u, params, g);
        const Eigen::MatrixXd jac = stationary_jacobian(u, params, g);
        const Field du = jac.partialPivLu().solve(r);
        if (!du.allFinite()) break;
        double damp = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 30; ++ls) {
            const Field trial = u - damp * du;
            const double tn = res_norm(trial);
            if (std::isfinite(tn) && tn < rn) {
                u = trial;
                rn = tn;
                improved = true;
                break;
            }
            damp *= 0.5;
        }
        if (!improved) break;
        ++gs.newtonSteps;
    }
    const EnergyBreakdown e = eval_energy(u, params, g);
    gs.uStar = std::move(u);
    gs.JStar = e.J;
    gs.IStar = e.I;
    gs.stationarityResidual = rn;
    gs.converged = rn <= opts.residualTol;
    return gs;
}

GroundState ground_state(const ModelParams& params, const Grid& g, const GroundStateOptions& opts) {
    const WellDepth well = compute_well_depth(1.0, params, g, opts.well);
    return polish_ground_state(well, params, g, opts);
}

std::string to_string(Limit l) {
    switch (l) {
        case Limit::Zero: return "zero";
        case Limit::GroundState: return "ground-state";
        case Limit::Inconclusive: return "inconclusive";
    }
    return "?";
}

ConvergenceReport convergence_track(const SimulationTrace& trace, const GroundState* gs,
                                    const ModelParams& params, const Grid& g, double tol) {
    ConvergenceReport rep;
    const SpdOperator a(g, 1.0, 1.0);
    std::vector<Snapshot> snaps = trace.snapshots;
    std::stable_sort(snaps.begin(), snaps.end(),
                     [](const Snapshot& x, const Snapshot& y) { return x.t < y.t; });

    double running = std::numeric_limits<double>::infinity();
    for (const auto& s : snaps) {
        if (!rep.samples.empty() && s.t == rep.samples.back().t) continue;
        ConvergenceSample c;
        c.t = s.t;
        const Field ut = a.solve(stationary_residual(s.u, params, g));
        c.dissipation = g.spacing() * ut.dot(a.apply(ut));
        c.distZero = grad_norm_r(s.u, g, params.p);
        c.distStar = std::numeric_limits<double>::infinity();
        if (gs != nullptr && gs->uStar.size() == s.u.size()) {
            c.distStar = std::min(grad_norm_r(s.u - gs->uStar, g, params.p),
                                  grad_norm_r(s.u + gs->uStar, g, params.p));
        }
        if (c.dissipation < running || c.dissipation == 0.0) {
            c.selected = true;
            running = c.dissipation;
        }
        rep.samples.push_back(c);
    }

    std::vector<const ConvergenceSample*> sel;
    for (const auto& c : rep.samples)
        if (c.selected) sel.push_back(&c);
    if (sel.empty()) return rep;

    const ConvergenceSample& last = *sel.back();
    const bool zero_closer = last.distZero <= last.distStar;
    const Limit candidate = zero_closer ? Limit::Zero : Limit::GroundState;
    auto dist = [&](const ConvergenceSample* c) {
        return candidate == Limit::Zero ? c->distZero : c->distStar;
    };
    rep.finalDistance = dist(sel.back());
    if (rep.finalDistance <= tol) {
        rep.limit = candidate;
        return rep;
    }
    // otherwise require a monotone approach over the second half of the selection
    if (sel.size() >= 3) {
        bool monotone = true;
        for (std::size_t i = sel.size() / 2 + 1; i < sel.size(); ++i)
            monotone = monotone && dist(sel[i]) <= dist(sel[i - 1]);
        if (monotone) rep.limit = candidate;
    }
    return rep;
}

std::vector<double> geometric_snapshot_times(double t0, double tEnd) {
    if (!(t0 > 0.0)) throw ParameterError("first snapshot time must be positive");
    std::vector<double> ts;
    for (double t = t0; t < tEnd; t *= 2.0) ts.push_back(t);
    return ts;
}

}  // namespace kirchlog
