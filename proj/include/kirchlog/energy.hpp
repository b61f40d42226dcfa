#pragma once

#include "kirchlog/grid.hpp"

#include <utility>

namespace kirchlog {

/// Terms of the potential energy J and the Nehari functional I.
struct EnergyBreakdown {
    double gradP = 0.0;   // |u_x|_p^p
    double grad2P = 0.0;  // |u_x|_p^{2p}
    double logTerm = 0.0; // int |u|^{q+1} log|u|
    double normQ1 = 0.0;  // |u|_{q+1}^{q+1}
    double J = 0.0;
    double I = 0.0;
};

EnergyBreakdown eval_energy(const Field& u, const ModelParams& params, const Grid& g);

/// I_delta(u) = delta (a |u_x|_p^p + b |u_x|_p^{2p}) - int |u|^{q+1} log|u|
double eval_I_delta(const Field& u, double delta, const ModelParams& params, const Grid& g);

/// J rewritten through I; equal to J up to rounding.
double energy_from_nehari_identity(const EnergyBreakdown& e, const ModelParams& params);

/// The three integrals that determine J and I along the ray lambda -> lambda u.
/// Every ray quantity is O(1) once these are known.
struct RayIntegrals {
    double gradP = 0.0;
    double logTerm = 0.0;
    double normQ1 = 0.0;

    static RayIntegrals of(const Field& u, const ModelParams& params, const Grid& g);

    /// J(lambda u)
    double energy(double lambda, const ModelParams& params) const;
    /// I_delta(lambda u)
    double nehari(double lambda, double delta, const ModelParams& params) const;
    /// g_delta(lambda) = lambda^{-(q+1)} I_delta(lambda u); strictly decreasing.
    double fibering(double lambda, double delta, const ModelParams& params) const;
};

/// g(lambda) = a l^{p-q-1} |u_x|_p^p + b l^{2p-q-1} |u_x|_p^{2p} - int |u|^{q+1} log|l u|.
/// d/dl J(l u) = l^q g(l).
double fibering_g(double lambda, const Field& u, const ModelParams& params, const Grid& g);

struct FiberingResult {
    double lambdaStar = 0.0;
    std::pair<double, double> bracket{0.0, 0.0};  // g(lo) > 0 > g(hi)
    double residual = 0.0;                        // |g(lambdaStar)|
};

/// Default relative tolerance on I(lambda* u).
inline constexpr double kFiberingTol = 1e-10;

/// Unique root of g_delta by bisection in log(lambda) over [1e-12, 1e12].
/// delta = 1 gives the Nehari scale lambda*.
FiberingResult find_lambda_delta(const Field& u, double delta, const ModelParams& params,
                                 const Grid& g, double tol = kFiberingTol);

FiberingResult find_lambda_star(const Field& u, const ModelParams& params, const Grid& g,
                                double tol = kFiberingTol);

/// lambda* u, the point where the ray through u meets the Nehari manifold.
Field nehari_project(const Field& u, const ModelParams& params, const Grid& g,
                     double tol = kFiberingTol);

/// L2 gradient density of J: J(u + e v) = J(u) + e (grad, v) + o(e).
/// Equals -(M(|u_x|_p^p) Delta_p u + f(u)).
Field energy_gradient(const Field& u, const ModelParams& params, const Grid& g);

/// L2 gradient density of I_delta.
Field nehari_gradient(const Field& u, double delta, const ModelParams& params, const Grid& g);

/// M(|u_x|_p^p) Delta_p u + f(u); zero exactly at stationary points.
Field stationary_residual(const Field& u, const ModelParams& params, const Grid& g);

}  // namespace kirchlog
