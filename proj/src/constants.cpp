#include "kirchlog/constants.hpp"

#include "kirchlog/errors.hpp"
#include "kirchlog/initial_data.hpp"
#include "kirchlog/operators.hpp"
#include "sphere_descent.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace kirchlog {

std::string to_string(ConstantKind kind) {
    switch (kind) {
        case ConstantKind::S: return "S";
        case ConstantKind::S1: return "S1";
        case ConstantKind::BetaGN: return "betaGN";
        case ConstantKind::Theta: return "theta";
        case ConstantKind::Cstar: return "Cstar";
        case ConstantKind::Clower: return "Clower";
        case ConstantKind::Kp: return "Kp";
    }
    return "?";
}

double gn_theta(const ModelParams& params) {
    const double n = ModelParams::dimension;
    return (0.5 - 1.0 / (params.q + 2.0)) / (0.5 - 1.0 / params.p + 1.0 / n);
}

namespace {

// d/du log |u|_r as an L2 density: |u|^{r-2} u / |u|_r^r
Field log_norm_gradient(const Field& u, const Grid& g, double r) {
    const double pr = power_integral(u, g, r);
    Field out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double s = u[i];
        out[i] = s == 0.0 ? 0.0 : std::pow(std::abs(s), r - 2.0) * s / pr;
    }
    return out;
}

// log |u|_num - w2 log |u|_2 - wg log |u_x|_p, maximised on the sphere.
double maximize_ratio(const ModelParams& params, const Grid& g, const ConstantOptions& opts,
                      double num_exp, double w2, double wg) {
    const double p = params.p;
    detail::SphereObjective objective = [&](const Field& u) -> std::optional<detail::Evaluation> {
        const double pn = power_integral(u, g, num_exp);
        const double gp = grad_power_integral(u, g, p);
        if (!(pn > 0.0) || !(gp > 0.0)) return std::nullopt;
        double value = std::log(pn) / num_exp - wg * std::log(gp) / p;
        Field grad = log_norm_gradient(u, g, num_exp) + wg * p_laplacian(u, g, p) / gp;
        if (w2 != 0.0) {
            const double p2 = power_integral(u, g, 2.0);
            value -= w2 * 0.5 * std::log(p2);
            grad -= w2 * u / p2;
        }
        return detail::Evaluation{-value, -grad};
    };

    const SpdOperator riesz(g, 0.0, 1.0);
    detail::DescentOptions dopts;
    dopts.max_iterations = opts.max_iterations;
    dopts.rel_tol = opts.tol;

    std::mt19937_64 rng(opts.seed);
    double best = -std::numeric_limits<double>::infinity();
    bool any_converged = false;
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
        const Field start = r == 0 ? sine_mode(g, 1, 1.0) : random_smooth(g, rng);
        const auto res = detail::minimize_on_sphere(objective, start, g, p, riesz, dopts);
        if (res.iterations == 0 && !res.converged) continue;
        any_converged = any_converged || res.converged;
        best = std::max(best, std::exp(-res.value));
    }
    if (!any_converged) throw EstimationError("embedding constant ascent did not converge", best);
    return best;
}

}  // namespace

double estimate_constant(ConstantKind kind, const ModelParams& params, const Grid& g,
                         const ConstantOptions& opts) {
    params.validate();
    const double p = params.p;
    const double q = params.q;
    switch (kind) {
        case ConstantKind::S: return maximize_ratio(params, g, opts, q + 2.0, 0.0, 1.0);
        case ConstantKind::S1: return maximize_ratio(params, g, opts, q + 1.0, 0.0, 1.0);
        case ConstantKind::BetaGN: {
            const double theta = gn_theta(params);
            return maximize_ratio(params, g, opts, q + 2.0, 1.0 - theta, theta);
        }
        case ConstantKind::Theta: return gn_theta(params);
        // Discrete Hoelder over N+1 cells of total measure L.
        case ConstantKind::Cstar: return std::pow(g.length(), 0.5 - 1.0 / p);
        // Square root of the first eigenvalue of the 3-point Dirichlet Laplacian.
        case ConstantKind::Clower: {
            const double h = g.spacing();
            const double s = std::sin(std::numbers::pi * h / (2.0 * g.length()));
            return 2.0 * s / h;
        }
        case ConstantKind::Kp: return std::pow(2.0, p - 1.0);
    }
    throw ParameterError("unknown constant kind");
}

EmbeddingConstants estimate_embedding_constants(const ModelParams& params, const Grid& g,
                                                const ConstantOptions& opts) {
    EmbeddingConstants c;
    c.S = estimate_constant(ConstantKind::S, params, g, opts);
    c.S1 = estimate_constant(ConstantKind::S1, params, g, opts);
    c.betaGN = estimate_constant(ConstantKind::BetaGN, params, g, opts);
    c.theta = estimate_constant(ConstantKind::Theta, params, g, opts);
    c.Cstar = estimate_constant(ConstantKind::Cstar, params, g, opts);
    c.Clower = estimate_constant(ConstantKind::Clower, params, g, opts);
    c.Kp = estimate_constant(ConstantKind::Kp, params, g, opts);
    return c;
}

double r_of_delta(double delta, const EmbeddingConstants& c, const ModelParams& params) {
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
    const double q2 = params.q + 2.0;
    return std::pow(delta * params.a / std::pow(c.S, q2), 1.0 / (q2 - params.p));
}

double f_of_y(double y, const EmbeddingConstants& c, const ModelParams& params) {
    if (y < 0.0) throw DomainError("f(y) is defined for y >= 0");
    const double p = params.p;
    const double q1 = params.q + 1.0;
    return params.b * (q1 - 2.0 * p) / (2.0 * p * q1) * std::pow(y, 2.0 * p) +
           params.a * (q1 - p) / (p * q1) * std::pow(y, p) +
           std::pow(c.S1, q1) / (q1 * q1) * std::pow(y, q1);
}

double kappa_root(double target, const EmbeddingConstants& c, const ModelParams& params) {
    if (!(target > 0.0)) throw DomainError("kappa_root needs a positive target");
    double lo = 0.0;
    double hi = 1.0;
    while (f_of_y(hi, c, params) < target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e150) throw NumericalRangeError("kappa_root: target out of range");
    }
    for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f_of_y(mid, c, params) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double kappa_tilde(double s, const ModelParams& params) {
    if (!(s > 0.0)) throw DomainError("kappa_tilde needs s > 0");
    const double p = params.p;
    const double q1 = params.q + 1.0;
    return std::pow(p * s * q1 / (params.a * (q1 - p)), 1.0 / p);
}

double lambda_s_lower_bound(double s, double d, const EmbeddingConstants& c,
                            const ModelParams& params) {
    if (!(s > d)) throw DomainError("lambda_s bound needs s > d");
    const double p = params.p;
    const double q2 = params.q + 2.0;
    const double theta = c.theta;
    const double exponent = p - theta * q2;
    double base = 1.0;
    if (exponent > 0.0)
        base = kappa_root(d, c, params);
    else if (exponent < 0.0)
        base = kappa_tilde(s, params);
    const double inner_value = params.a / std::pow(c.betaGN, q2) * std::pow(base, exponent);
    return std::pow(inner_value, 2.0 / ((1.0 - theta) * q2));
}

double Lambda_s_upper_bound(double s, double d, const ModelParams& params) {
    if (!(s > d)) throw DomainError("Lambda_s bound needs s > d");
    const double kt = kappa_tilde(s, params);
    return (1.0 + params.k) * std::pow(params.measure(), (params.p - 2.0) / params.p) * kt * kt;
}

double decay_gamma(const EmbeddingConstants& c, const ModelParams& params) {
    const double p = params.p;
    const double cs2p = std::pow(c.Cstar, 2.0 * p);
    const double second = params.b * std::pow(c.Clower, 2.0 * p) / (2.0 * cs2p);
    if (params.k == 0) return second;
    const double first = params.b / (2.0 * std::pow(params.k, p) * cs2p);
    return std::min(first, second);
}

}  // namespace kirchlog
