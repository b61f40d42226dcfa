#pragma once

#include "kirchlog/errors.hpp"
#include "kirchlog/grid.hpp"
#include "kirchlog/operators.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace kirchlog {

enum class Scheme { LaggedImplicit, FullyImplicit };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct StepperConfig {
    double dt0 = 1e-4;
    double dtMin = 1e-12;
    double dtMax = 1e-2;
    double safety = 0.9;
    double blowupNormThreshold = 1e6;    // on |u|_2
    double extinctionThreshold = 1e-10;  // on |u|_2
    double tEnd = 1.0;
    Scheme scheme = Scheme::LaggedImplicit;
    double nonlinearSolverTol = 1e-12;
    int maxNewtonIters = 30;

    // step acceptance: |J1 - J0 + dt D| <= energyRtol dt D + energyAtol max(1, |J0|)
    double energyRtol = 0.1;
    double energyAtol = 1e-12;
    int implicitAfterRejections = 8;  // consecutive rejections before switching scheme
    double decayFraction = 1e-2;      // X(tEnd) <= fraction X(0) counts as decay
    long maxSteps = 20'000'000;

    std::vector<double> snapshotTimes;

    void validate() const;
};

struct TraceRecord {
    double t = 0.0;
    double dt = 0.0;  // step that produced this state (0 for the initial record)
    double J = 0.0;
    double I = 0.0;
    double norm2sq = 0.0;      // |u|_2^2
    double gradNorm2sq = 0.0;  // |u_x|_2^2
    double gradNormP = 0.0;    // |u_x|_p
    double normQ1 = 0.0;       // |u|_{q+1}
    double dissipation = 0.0;  // |u_t|_2^2 + k |u_xt|_2^2 over the step
    double energyResidual = 0.0;  // J(u^{n+1}) - J(u^n) + dt dissipation
};

struct Snapshot {
    double t = 0.0;
    Field u;
};

struct SimulationTrace {
    std::vector<TraceRecord> records;
    std::vector<Snapshot> snapshots;  // requested times, then the final state
    Field final;
    long rejected = 0;
    bool switchedToImplicit = false;
};

struct Outcome {
    enum class Kind { GlobalDecay, BlowUp, Extinct, Undecided };
    enum class Cause { None, NormThreshold, StepUnderflow };

    Kind kind = Kind::Undecided;
    Cause cause = Cause::None;
    double tReached = 0.0;     // GlobalDecay / Undecided
    double tEstimate = 0.0;    // BlowUp
    double lastFiniteT = 0.0;  // BlowUp
    double tStar = 0.0;        // Extinct
};

std::string to_string(Outcome::Kind k);
std::string to_string(Outcome::Cause c);

/// Newton failure in the fully implicit scheme; the caller halves dt.
class StepRejected : public Error {
public:
    using Error::Error;
};

/// Time stepper with the pseudo-parabolic operator I + k K factored once.
class Stepper {
public:
    Stepper(const ModelParams& params, const Grid& g);

    /// Lagged:   (I + kK)(v - u) = dt [M(|u_x|_p^p) Delta_p u + f(u)]
    /// Implicit: (I + kK)(v - u) = dt [M(|v_x|_p^p) Delta_p v + f(v)]
    Field step(const Field& u, double dt, Scheme scheme, const StepperConfig& cfg) const;

    /// |v|_2^2 + k |v_x|_2^2 = h v^T (I + kK) v
    double pseudo_norm_sq(const Field& v) const;

private:
    ModelParams params_;
    Grid grid_;
    SpdOperator op_;
};

Field step(const Field& u, double dt, const ModelParams& params, const Grid& g,
           const StepperConfig& cfg);

struct RunResult {
    SimulationTrace trace;
    Outcome outcome;
};

RunResult run(const Field& u0, const ModelParams& params, const Grid& g, const StepperConfig& cfg);

/// Worst signed violation of the discrete energy identity over the trace.
double discrete_energy_residual(const SimulationTrace& trace);

/// Root of a linear fit to the tail of (|u|_2^2 + k|u_x|_2^2)^{(1-q)/2}.
/// Never below the last recorded time.
double estimate_blowup_time(const SimulationTrace& trace, const ModelParams& params);

inline constexpr const char* kTraceCsvHeader = "t,dt,J,I,norm2sq,gradNormP,dissipation";

/// Writes every stride-th record plus the last one.
void write_trace_csv(std::ostream& os, const SimulationTrace& trace, int stride = 1);

}  // namespace kirchlog
