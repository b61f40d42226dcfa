#pragma once

#include "kirchlog/grid.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace kirchlog {

struct WellOptions {
    int restarts = 8;
    std::uint64_t seed = 1;
    int max_iterations = 4000;
    double tol = 1e-13;  // relative stagnation threshold of the descent
};

/// d(delta) = inf { J(u) : I_delta(u) = 0, u != 0 }, computed as
/// inf_u J(lambda_delta(u) u) over the unit sphere of |u_x|_p.
struct WellDepth {
    double delta = 1.0;
    double d = 0.0;
    Field minimizer;              // lies on the delta-Nehari set
    int restarts = 0;
    int converged = 0;            // starts whose descent stalled before max_iterations
    std::vector<double> history;  // best value after each start
};

/// Multi-start minimisation. Throws OptimizationError when every start fails.
WellDepth compute_well_depth(double delta, const ModelParams& params, const Grid& g,
                             const WellOptions& opts = {});

/// Descent from a single start; used for continuation in delta.
WellDepth refine_well_depth(double delta, const Field& start, const ModelParams& params,
                            const Grid& g, const WellOptions& opts = {});

struct DeltaCurve {
    std::vector<double> deltas;
    std::vector<double> values;
};

/// Evaluates d(delta) with a fresh multi-start at delta = 1 and warm-started
/// continuation away from 1. Along a fixed ray J(lambda_delta u) increases in
/// delta below 1 and decreases above 1, so continuation from the neighbour
/// closer to 1 keeps each branch monotone.
class DeltaCurveBuilder {
public:
    DeltaCurveBuilder(const ModelParams& params, const Grid& g, const WellOptions& opts = {});

    const WellDepth& ground() const { return ground_; }
    double depth() const { return ground_.d; }

    /// d(delta); results are cached.
    double operator()(double delta);

    DeltaCurve curve(const std::vector<double>& deltas);

    const ModelParams& params() const { return params_; }
    const Grid& grid() const { return grid_; }

private:
    ModelParams params_;
    Grid grid_;
    WellOptions opts_;
    WellDepth ground_;
    std::map<double, WellDepth> cache_;
};

struct DeltaRoots {
    double delta1 = 0.0;
    double delta2 = 0.0;
    /// False when d stays above E down to the search floor; delta1 is then 0.
    bool lowerRootFound = true;
    double lowerValue = 0.0;  // d(delta1), or d at the floor when no root was found
    double upperValue = 0.0;
};

inline constexpr double kDeltaFloor = 1e-4;

/// Roots delta1 < 1 < delta2 of d(delta) = E by bisection on each branch.
/// Throws DomainError unless 0 < E < d.
DeltaRoots delta_roots(double E, DeltaCurveBuilder& curve, double tol = 1e-10);

}  // namespace kirchlog
