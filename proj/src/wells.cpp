#include "kirchlog/wells.hpp"

#include "kirchlog/energy.hpp"
#include "kirchlog/errors.hpp"
#include "kirchlog/initial_data.hpp"
#include "kirchlog/operators.hpp"
#include "sphere_descent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace kirchlog {

namespace {

detail::SphereObjective fibered_energy(double delta, const ModelParams& params, const Grid& g) {
    return [delta, &params, &g](const Field& u) -> std::optional<detail::Evaluation> {
        double lambda = 0.0;
        try {
            lambda = find_lambda_delta(u, delta, params, g).lambdaStar;
        } catch (const Error&) {
            return std::nullopt;
        }
        const Field w = lambda * u;
        const EnergyBreakdown e = eval_energy(w, params, g);
        const Field grad_j = energy_gradient(w, params, g);
        const Field grad_i = nehari_gradient(w, delta, params, g);
        const double denom = inner(grad_i, w, g);
        if (!std::isfinite(e.J) || denom == 0.0) return std::nullopt;
        const double mu = e.I / denom;
        return detail::Evaluation{e.J, lambda * (grad_j - mu * grad_i)};
    };
}

detail::DescentOptions descent_options(const WellOptions& opts) {
    detail::DescentOptions d;
    d.max_iterations = opts.max_iterations;
    d.rel_tol = opts.tol;
    return d;
}

}  // namespace

WellDepth refine_well_depth(double delta, const Field& start, const ModelParams& params,
                            const Grid& g, const WellOptions& opts) {
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
    const SpdOperator riesz(g, 0.0, 1.0);
    const auto objective = fibered_energy(delta, params, g);
    const auto res = detail::minimize_on_sphere(objective, start, g, params.p, riesz,
                                                descent_options(opts));
    if (res.iterations == 0) throw OptimizationError("well-depth start is not admissible");
    WellDepth w;
    w.delta = delta;
    w.d = res.value;
    w.minimizer = find_lambda_delta(res.point, delta, params, g).lambdaStar * res.point;
    w.restarts = 1;
    w.converged = res.converged ? 1 : 0;
    w.history.push_back(res.value);
    return w;
}

WellDepth compute_well_depth(double delta, const ModelParams& params, const Grid& g,
                             const WellOptions& opts) {
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
    params.validate();
    std::mt19937_64 rng(opts.seed);
    WellDepth best;
    best.delta = delta;
    best.d = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
        const Field start = random_smooth(g, rng);
        ++best.restarts;
        try {
            WellDepth one = refine_well_depth(delta, start, params, g, opts);
            best.converged += one.converged;
            if (one.d < best.d) {
                best.d = one.d;
                best.minimizer = std::move(one.minimizer);
            }
        } catch (const Error&) {
        }
        best.history.push_back(best.d);
    }
    if (!std::isfinite(best.d)) {
        std::ostringstream msg;
        msg << "all " << best.restarts << " well-depth starts failed at delta = " << delta;
        throw OptimizationError(msg.str());
    }
    return best;
}

DeltaCurveBuilder::DeltaCurveBuilder(const ModelParams& params, const Grid& g,
                                     const WellOptions& opts)
    : params_(params), grid_(g), opts_(opts), ground_(compute_well_depth(1.0, params, g, opts)) {
    cache_.emplace(1.0, ground_);
}

double DeltaCurveBuilder::operator()(double delta) {
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
    if (auto it = cache_.find(delta); it != cache_.end()) return it->second.d;

    // nearest cached point between delta and 1
    const WellDepth* from = &ground_;
    for (const auto& [dl, w] : cache_) {
        const bool between = delta < 1.0 ? (dl > delta && dl <= 1.0) : (dl < delta && dl >= 1.0);
        if (between && std::abs(dl - delta) < std::abs(from->delta - delta)) from = &w;
    }
    WellDepth w = refine_well_depth(delta, from->minimizer, params_, grid_, opts_);
    const double d = w.d;
    cache_.emplace(delta, std::move(w));
    return d;
}

DeltaCurve DeltaCurveBuilder::curve(const std::vector<double>& deltas) {
    // walk outward from 1 so every point is continued from its inner neighbour
    std::vector<double> below, above;
    for (double dl : deltas) (dl < 1.0 ? below : above).push_back(dl);
    std::sort(below.rbegin(), below.rend());
    std::sort(above.begin(), above.end());
    for (double dl : below) (*this)(dl);
    for (double dl : above) (*this)(dl);

    DeltaCurve c;
    c.deltas = deltas;
    for (double dl : deltas) c.values.push_back((*this)(dl));
    return c;
}

DeltaRoots delta_roots(double E, DeltaCurveBuilder& curve, double tol) {
    const double d = curve.depth();
    if (!(E > 0.0) || !(E < d)) {
        std::ostringstream msg;
        msg << "delta roots need 0 < E < d; E = " << E << ", d = " << d;
        throw DomainError(msg.str());
    }
    auto bisect = [&](double lo, double hi, bool increasing) {
        // lo < hi, d - E changes sign on [lo, hi]
        for (int it = 0; it < 200 && hi - lo > tol; ++it) {
            const double mid = 0.5 * (lo + hi);
            const bool above = curve(mid) >= E;
            if (above == increasing)
                hi = mid;
            else
                lo = mid;
        }
        return 0.5 * (lo + hi);
    };

    DeltaRoots r;
    // lower branch: walk down from 1 by halving until d < E
    double inner = 1.0;
    double outer = 0.5;
    while (curve(outer) >= E && outer > kDeltaFloor) {
        inner = outer;
        outer = std::max(kDeltaFloor, outer * 0.5);
    }
    if (curve(outer) >= E) {
        r.lowerRootFound = false;
        r.delta1 = 0.0;
        r.lowerValue = curve(outer);
    } else {
        r.delta1 = bisect(outer, inner, true);
        r.lowerValue = curve(r.delta1);
    }

    inner = 1.0;
    outer = 2.0;
    while (curve(outer) >= E) {
        inner = outer;
        outer *= 2.0;
        if (outer > 1e6) throw NumericalRangeError("upper delta root not bracketed below 1e6");
    }
    r.delta2 = bisect(inner, outer, false);
    r.upperValue = curve(r.delta2);
    return r;
}

}  // namespace kirchlog
