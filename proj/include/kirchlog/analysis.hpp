#pragma once

#include "kirchlog/constants.hpp"
#include "kirchlog/evolution.hpp"
#include "kirchlog/grid.hpp"
#include "kirchlog/wells.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kirchlog {

/// Data the classifier needs about the discrete landscape of one grid.
struct WellContext {
    double d = 0.0;
    EmbeddingConstants constants;
};

enum class Regime {
    SubcriticalGlobal,
    SubcriticalBlowup,
    CriticalGlobal,
    CriticalBlowup,
    HighEnergyGlobal,
    HighEnergyBlowup,
    HighEnergyUndetermined,
};

std::string to_string(Regime r);

/// True for regimes whose predicted outcome is global existence.
bool predicts_global(Regime r);
/// True for regimes whose predicted outcome is blow-up.
bool predicts_blowup(Regime r);

struct Classification {
    double Ju0 = 0.0;
    double Iu0 = 0.0;
    double d = 0.0;
    double X0 = 0.0;  // |u0|_2^2 + k |u0_x|_2^2
    Regime regime = Regime::SubcriticalGlobal;
    bool criticalBand = false;                  // |J - d| within the equality band
    std::optional<double> lambdaLower;          // lower bound on lambda_{J(u0)} (J > d only)
    std::optional<double> LambdaUpper;          // upper bound on Lambda_{J(u0)} (J > d only)
};

/// |J - d| <= max(1e-8, 1e-4 d) counts as J = d.
bool in_critical_band(double J, double d);

Classification classify(const Field& u0, const ModelParams& params, const Grid& g,
                        const WellContext& wells);

/// Scale c > 0 with J(c u) = target. Branch "below" searches (0, lambda*],
/// where J increases from 0; "above" searches [lambda*, inf), where J
/// decreases without bound. Throws DomainError when the target is not
/// attained on the branch.
enum class RayBranch { Below, Above };
double scale_to_energy(const Field& u, double target, RayBranch branch, const ModelParams& params,
                       const Grid& g);

struct DecayReport {
    double delta1 = 0.0;
    double gamma = 0.0;
    double C = 0.0;  // 2 (1 - delta1)(p - 1) gamma / Kp
    double delta3 = 0.0;
    double beta = 0.0;
    double alpha = 0.0;
    double alphaTilde = 0.0;  // max over the trace of G / J
    double G0 = 0.0;          // J(u0) + X0
    double polyMaxViolation = 0.0;  // max_t X(t) - polyBound(t)
    double expMaxViolation = 0.0;   // max_t J(t) - G0 exp(-(alpha/alphaTilde) t)
    std::vector<double> polyBound;  // per trace record
    std::vector<double> expBound;
};

/// Polynomial and exponential decay envelopes on a global trace. delta1 is
/// the lower root of d(delta) = J(u0). Throws DomainError unless the
/// classification is subcritical global with J(u0) > 0.
DecayReport check_decay_bounds(const SimulationTrace& trace, const Classification& cls,
                               const EmbeddingConstants& constants, double delta1,
                               const ModelParams& params);

struct LifespanReport {
    std::optional<double> boundNegE;  // J(u0) < 0
    std::optional<double> boundPosE;  // when the t0 condition triggers
    std::optional<double> t0;
    std::optional<double> beta0Max;
    std::optional<double> observedT;  // blow-up time estimate of the run
};

/// Life-span upper bounds evaluated on a blow-up trace.
LifespanReport lifespan_bounds(const SimulationTrace& trace, const Outcome& outcome,
                               const ModelParams& params);

struct GroundStateOptions {
    WellOptions well;
    double residualTol = 1e-6;  // on the dual norm of the stationary residual
    int maxNewtonIters = 50;
};

struct GroundState {
    Field uStar;
    double JStar = 0.0;
    double IStar = 0.0;
    double d = 0.0;  // well depth the minimiser came from
    double stationarityResidual = 0.0;
    int newtonSteps = 0;
    bool converged = false;
};

/// Dual norm (w.r.t. |v_x|_2) of M(|u_x|_p^p) Delta_p u + f(u).
double stationarity_residual(const Field& u, const ModelParams& params, const Grid& g);

GroundState ground_state(const ModelParams& params, const Grid& g,
                         const GroundStateOptions& opts = {});

/// Newton polish of a given Nehari minimiser.
GroundState polish_ground_state(const WellDepth& well, const ModelParams& params, const Grid& g,
                                const GroundStateOptions& opts = {});

struct ConvergenceSample {
    double t = 0.0;
    double dissipation = 0.0;  // |u_t|_2^2 + |u_xt|_2^2 at the snapshot
    double distZero = 0.0;     // |(u - 0)_x|_p
    double distStar = 0.0;     // min over w = +-u*
    bool selected = false;
};

enum class Limit { Zero, GroundState, Inconclusive };
std::string to_string(Limit l);

struct ConvergenceReport {
    std::vector<ConvergenceSample> samples;
    Limit limit = Limit::Inconclusive;
    double finalDistance = 0.0;  // to the declared limit
};

/// Picks snapshots along which the dissipation decreases and compares them
/// with the stationary candidates 0 and +-u*. tol is the distance below
/// which a candidate is accepted as the limit.
ConvergenceReport convergence_track(const SimulationTrace& trace, const GroundState* gs,
                                    const ModelParams& params, const Grid& g, double tol = 1e-6);

/// t0 2^k for k = 0, 1, ... while below tEnd.
std::vector<double> geometric_snapshot_times(double t0, double tEnd);

}  // namespace kirchlog
