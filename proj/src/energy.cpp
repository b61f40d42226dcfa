#include "kirchlog/energy.hpp"

#include "kirchlog/errors.hpp"

#include <cmath>
#include <sstream>

namespace kirchlog {

EnergyBreakdown eval_energy(const Field& u, const ModelParams& params, const Grid& g) {
    EnergyBreakdown e;
    const double p = params.p;
    const double q = params.q;
    e.gradP = grad_power_integral(u, g, p);
    e.grad2P = e.gradP * e.gradP;
    e.logTerm = log_power_integral(u, g, q);
    e.normQ1 = power_integral(u, g, q + 1.0);
    e.J = params.a / p * e.gradP + params.b / (2.0 * p) * e.grad2P - e.logTerm / (q + 1.0) +
          e.normQ1 / ((q + 1.0) * (q + 1.0));
    e.I = params.a * e.gradP + params.b * e.grad2P - e.logTerm;
    return e;
}

double eval_I_delta(const Field& u, double delta, const ModelParams& params, const Grid& g) {
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
    const double gp = grad_power_integral(u, g, params.p);
    return delta * (params.a * gp + params.b * gp * gp) - log_power_integral(u, g, params.q);
}

double energy_from_nehari_identity(const EnergyBreakdown& e, const ModelParams& params) {
    const double p = params.p;
    const double q1 = params.q + 1.0;
    return e.I / q1 + params.a * (1.0 / p - 1.0 / q1) * e.gradP +
           params.b * (1.0 / (2.0 * p) - 1.0 / q1) * e.grad2P + e.normQ1 / (q1 * q1);
}

RayIntegrals RayIntegrals::of(const Field& u, const ModelParams& params, const Grid& g) {
    RayIntegrals r;
    r.gradP = grad_power_integral(u, g, params.p);
    r.logTerm = log_power_integral(u, g, params.q);
    r.normQ1 = power_integral(u, g, params.q + 1.0);
    return r;
}

double RayIntegrals::energy(double lambda, const ModelParams& params) const {
    const double p = params.p;
    const double q1 = params.q + 1.0;
    const double lp = std::pow(lambda, p);
    const double lq = std::pow(lambda, q1);
    const double log_integral = logTerm + std::log(lambda) * normQ1;
    return params.a / p * lp * gradP + params.b / (2.0 * p) * lp * lp * gradP * gradP +
           lq * (normQ1 / (q1 * q1) - log_integral / q1);
}

double RayIntegrals::nehari(double lambda, double delta, const ModelParams& params) const {
    const double lp = std::pow(lambda, params.p);
    const double lq = std::pow(lambda, params.q + 1.0);
    return delta * (params.a * lp * gradP + params.b * lp * lp * gradP * gradP) -
           lq * (logTerm + std::log(lambda) * normQ1);
}

double RayIntegrals::fibering(double lambda, double delta, const ModelParams& params) const {
    const double p = params.p;
    const double q = params.q;
    return delta * (params.a * std::pow(lambda, p - q - 1.0) * gradP +
                    params.b * std::pow(lambda, 2.0 * p - q - 1.0) * gradP * gradP) -
           (logTerm + std::log(lambda) * normQ1);
}

double fibering_g(double lambda, const Field& u, const ModelParams& params, const Grid& g) {
    if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
    const RayIntegrals ray = RayIntegrals::of(u, params, g);
    if (!(ray.gradP > 0.0)) throw DomainError("fibering map needs a field with nonzero gradient");
    return ray.fibering(lambda, 1.0, params);
}

FiberingResult find_lambda_delta(const Field& u, double delta, const ModelParams& params,
                                 const Grid& g, double tol) {
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
    const RayIntegrals ray = RayIntegrals::of(u, params, g);
    if (!(ray.gradP > 0.0)) throw DomainError("fibering map needs a field with nonzero gradient");

    double lo = std::log(1e-12);
    double hi = std::log(1e12);
    const double g_lo = ray.fibering(std::exp(lo), delta, params);
    const double g_hi = ray.fibering(std::exp(hi), delta, params);
    if (!(g_lo > 0.0) || !(g_hi < 0.0)) {
        std::ostringstream msg;
        msg << "cannot bracket the fibering root in [1e-12, 1e12]: g(lo) = " << g_lo
            << ", g(hi) = " << g_hi;
        throw NumericalRangeError(msg.str());
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (ray.fibering(std::exp(mid), delta, params) > 0.0)
            lo = mid;
        else
            hi = mid;
    }

    FiberingResult r;
    r.bracket = {std::exp(lo), std::exp(hi)};
    r.lambdaStar = std::exp(0.5 * (lo + hi));
    r.residual = std::abs(ray.fibering(r.lambdaStar, delta, params));

    // |I_delta(l u)| relative to its gradient part
    const double lp = std::pow(r.lambdaStar, params.p);
    const double scale = std::max(1.0, delta * params.a * lp * ray.gradP);
    const double magnitude =
        delta * (params.a * lp * ray.gradP + params.b * lp * lp * ray.gradP * ray.gradP) +
        std::pow(r.lambdaStar, params.q + 1.0) *
            (std::abs(ray.logTerm) + std::abs(std::log(r.lambdaStar)) * ray.normQ1);
    const double nehari = std::abs(ray.nehari(r.lambdaStar, delta, params));
    if (nehari > tol * scale && nehari > 1e-13 * magnitude) {
        std::ostringstream msg;
        msg << "fibering root did not reach tolerance: |I| = " << nehari << ", bound " << tol * scale;
        throw NumericalRangeError(msg.str());
    }
    return r;
}

FiberingResult find_lambda_star(const Field& u, const ModelParams& params, const Grid& g, double tol) {
    return find_lambda_delta(u, 1.0, params, g, tol);
}

Field nehari_project(const Field& u, const ModelParams& params, const Grid& g, double tol) {
    return find_lambda_star(u, params, g, tol).lambdaStar * u;
}

Field energy_gradient(const Field& u, const ModelParams& params, const Grid& g) {
    return -stationary_residual(u, params, g);
}

Field nehari_gradient(const Field& u, double delta, const ModelParams& params, const Grid& g) {
    const double p = params.p;
    const double q = params.q;
    const double gp = grad_power_integral(u, g, p);
    Field out = -delta * p * (params.a + 2.0 * params.b * gp) * p_laplacian(u, g, p);
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double s = u[i];
        if (s == 0.0) continue;
        const double pw = std::pow(std::abs(s), q - 1.0) * s;
        out[i] -= pw * ((q + 1.0) * std::log(std::abs(s)) + 1.0);
    }
    return out;
}

Field stationary_residual(const Field& u, const ModelParams& params, const Grid& g) {
    const double gp = grad_power_integral(u, g, params.p);
    return params.kirchhoff(gp) * p_laplacian(u, g, params.p) + log_source(u, params.q);
}

}  // namespace kirchlog
