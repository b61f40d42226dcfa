#pragma once

// Preconditioned descent for scale-invariant functionals on the unit sphere
// of |u_x|_p. Shared by the embedding-constant ascent and the well-depth
// minimisation.

#include "kirchlog/grid.hpp"
#include "kirchlog/operators.hpp"

#include <functional>
#include <optional>

namespace kirchlog::detail {

struct Evaluation {
    double value;
    Field gradient;  // L2 density
};

/// Returns nullopt when the functional is undefined at u.
using SphereObjective = std::function<std::optional<Evaluation>(const Field&)>;

struct DescentOptions {
    int max_iterations = 4000;
    double rel_tol = 1e-13;     // relative decrease treated as stagnation
    double slope_tol = 1e-24;   // squared dual norm of the gradient
    int stall_window = 8;
};

struct DescentResult {
    double value = 0.0;
    Field point;
    int iterations = 0;
    bool converged = false;
};

/// Minimises a 0-homogeneous functional. The descent direction is the H^1_0
/// Riesz representative K^{-1} grad; iterates are renormalised after every
/// step.
DescentResult minimize_on_sphere(const SphereObjective& objective, Field start, const Grid& g,
                                 double p, const SpdOperator& riesz, const DescentOptions& opts);

Field normalize_gradient(const Field& u, const Grid& g, double p);

}  // namespace kirchlog::detail
