#include "sphere_descent.hpp"

#include <cmath>

namespace kirchlog::detail {

Field normalize_gradient(const Field& u, const Grid& g, double p) {
    const double n = grad_norm_r(u, g, p);
    return n > 0.0 ? Field(u / n) : u;
}

DescentResult minimize_on_sphere(const SphereObjective& objective, Field start, const Grid& g,
                                 double p, const SpdOperator& riesz, const DescentOptions& opts) {
    DescentResult res;
    res.point = normalize_gradient(start, g, p);
    auto current = objective(res.point);
    if (!current) return res;

    double step = 0.1;
    int stalled = 0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        res.iterations = it + 1;
        const Field dir = riesz.solve(current->gradient);
        const double slope = g.spacing() * current->gradient.dot(dir);
        if (!(slope > opts.slope_tol)) {
            res.converged = true;
            break;
        }

        // Armijo backtracking; the trial step grows after each success.
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            const Field trial = normalize_gradient(res.point - step * dir, g, p);
            auto ev = objective(trial);
            if (ev && std::isfinite(ev->value) && ev->value <= current->value - 1e-4 * step * slope) {
                const double drop = current->value - ev->value;
                res.point = trial;
                current = std::move(ev);
                accepted = true;
                step *= 2.0;
                if (drop <= opts.rel_tol * std::max(1.0, std::abs(current->value)))
                    ++stalled;
                else
                    stalled = 0;
                break;
            }
            step *= 0.5;
        }
        if (!accepted || stalled >= opts.stall_window) {
            res.converged = true;
            break;
        }
    }
    res.value = current->value;
    return res;
}

}  // namespace kirchlog::detail
