#include "kirchlog/initial_data.hpp"

#include "kirchlog/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace kirchlog {

Field sine_mode(const Grid& g, int mode, double amplitude) {
    if (mode < 1) throw ParameterError("sine mode must be >= 1");
    Field u(g.size());
    for (int i = 0; i < g.size(); ++i)
        u[i] = amplitude * std::sin(mode * std::numbers::pi * g.node(i) / g.length());
    return u;
}

Field polynomial_bump(const Grid& g, double amplitude) {
    Field u(g.size());
    const double l = g.length();
    for (int i = 0; i < g.size(); ++i) {
        const double x = g.node(i);
        const double s = 4.0 * x * (l - x) / (l * l);
        u[i] = amplitude * s * s;
    }
    return u;
}

namespace {

Field rescale_max(Field u, double amplitude) {
    const double m = u.cwiseAbs().maxCoeff();
    if (m > 0.0) u *= amplitude / m;
    return u;
}

}  // namespace

Field random_smooth(const Grid& g, std::mt19937_64& rng, double amplitude) {
    std::uniform_int_distribution<int> count(1, 3);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<int> modes{1, 2, 3, 4};
    std::shuffle(modes.begin(), modes.end(), rng);
    const int m = count(rng);
    Field u = Field::Zero(g.size());
    for (int j = 0; j < m; ++j) {
        double c = coef(rng);
        if (std::abs(c) < 0.1) c = c < 0 ? -0.1 : 0.1;
        u += sine_mode(g, modes[j], c);
    }
    return rescale_max(std::move(u), amplitude);
}

Field random_modes(const Grid& g, std::mt19937_64& rng, int modes, double amplitude) {
    if (modes < 1) throw ParameterError("random initial data needs at least one mode");
    std::normal_distribution<double> coef(0.0, 1.0);
    Field u = Field::Zero(g.size());
    for (int m = 1; m <= modes; ++m) u += sine_mode(g, m, coef(rng) / m);
    return rescale_max(std::move(u), amplitude);
}

}  // namespace kirchlog
