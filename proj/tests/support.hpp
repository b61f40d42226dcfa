#pragma once

// Shared fixtures for the C++ tests: desk parameters, hand-rolled random
// generators and brute-force oracles written against plain std::vector so
// they share no code with the library.

#include "kirchlog/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace kt {

inline kirchlog::ModelParams desk_params() {
    kirchlog::ModelParams m;
    m.a = 1.0;
    m.b = 1.0;
    m.k = 1;
    m.p = 2.0;
    m.q = 5.0;
    m.length = 1.0;
    return m;
}

constexpr int kDeskN = 127;
const double kPi = std::acos(-1.0);

// ---- generators -----------------------------------------------------------

/// Nodal noise in [-amp, amp]; fields are rough on purpose.
inline kirchlog::Field rough_field(int n, std::mt19937_64& rng, double amp) {
    std::uniform_real_distribution<double> U(-amp, amp);
    kirchlog::Field u(n);
    for (int i = 0; i < n; ++i) u[i] = U(rng);
    return u;
}

/// Up to five sine modes with decaying random coefficients, plus a random
/// overall scale in [lo, hi].
inline kirchlog::Field smooth_field(int n, double length, std::mt19937_64& rng, double lo,
                                    double hi) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::uniform_real_distribution<double> S(lo, hi);
    std::uniform_int_distribution<int> M(1, 5);
    const int modes = M(rng);
    std::vector<double> c(modes);
    for (int m = 0; m < modes; ++m) c[m] = U(rng) / (m + 1);
    c[0] += (c[0] >= 0.0 ? 1.0 : -1.0);  // keep the field away from zero
    const double h = length / (n + 1);
    kirchlog::Field u(n);
    double peak = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = (i + 1) * h;
        double s = 0.0;
        for (int m = 0; m < modes; ++m) s += c[m] * std::sin((m + 1) * kPi * x / length);
        u[i] = s;
        peak = std::max(peak, std::abs(s));
    }
    return u * (S(rng) / peak);
}

inline kirchlog::Field sine(int n, double length, double amp, int mode = 1) {
    kirchlog::Field u(n);
    const double h = length / (n + 1);
    for (int i = 0; i < n; ++i) u[i] = amp * std::sin(mode * kPi * (i + 1) * h / length);
    return u;
}

// ---- oracles --------------------------------------------------------------

struct OracleEnergy {
    double G = 0.0;    // h sum |D|^p
    double Lg = 0.0;   // h sum |u|^{q+1} log|u|
    double Q = 0.0;    // h sum |u|^{q+1}
    double J = 0.0;
    double I = 0.0;
};

/// Node-by-node summation with the zero extension written out explicitly.
inline OracleEnergy oracle_energy(const std::vector<double>& interior, double length, double a,
                                  double b, double p, double q) {
    const std::size_t n = interior.size();
    std::vector<double> full(n + 2, 0.0);
    for (std::size_t i = 0; i < n; ++i) full[i + 1] = interior[i];
    const double h = length / static_cast<double>(n + 1);
    OracleEnergy e;
    for (std::size_t j = 1; j < full.size(); ++j) {
        const double slope = (full[j] - full[j - 1]) / h;
        e.G += h * std::pow(std::fabs(slope), p);
    }
    for (std::size_t i = 1; i + 1 < full.size(); ++i) {
        const double v = std::fabs(full[i]);
        if (v > 0.0) e.Lg += h * std::pow(v, q + 1) * std::log(v);
        e.Q += h * std::pow(v, q + 1);
    }
    e.J = a * e.G / p + b * e.G * e.G / (2 * p) - e.Lg / (q + 1) + e.Q / ((q + 1) * (q + 1));
    e.I = a * e.G + b * e.G * e.G - e.Lg;
    return e;
}

inline double oracle_I_delta(const std::vector<double>& interior, double length, double a,
                             double b, double p, double q, double delta) {
    const OracleEnergy e = oracle_energy(interior, length, a, b, p, q);
    return delta * (a * e.G + b * e.G * e.G) - e.Lg;
}

inline std::vector<double> to_std(const kirchlog::Field& u) {
    return std::vector<double>(u.data(), u.data() + u.size());
}

/// One explicit Euler step of u_t = M(G) Delta_p u + |u|^{q-1} u log|u|
/// (the k = 0 lagged scheme), nodewise with the zero extension.
inline std::vector<double> oracle_euler_step(const std::vector<double>& interior, double length,
                                             double a, double b, double p, double q, double dt) {
    const std::size_t n = interior.size();
    const double h = length / static_cast<double>(n + 1);
    std::vector<double> full(n + 2, 0.0);
    for (std::size_t i = 0; i < n; ++i) full[i + 1] = interior[i];
    auto flux = [&](std::size_t j) {
        const double s = (full[j] - full[j - 1]) / h;
        return std::pow(std::fabs(s), p - 2) * s;
    };
    double G = 0.0;
    for (std::size_t j = 1; j < full.size(); ++j)
        G += h * std::pow(std::fabs((full[j] - full[j - 1]) / h), p);
    const double M = a + b * G;
    std::vector<double> out(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const double v = full[i];
        const double src = v == 0.0 ? 0.0 : std::pow(std::fabs(v), q - 1) * v * std::log(std::fabs(v));
        out[i - 1] = v + dt * (M * (flux(i + 1) - flux(i)) / h + src);
    }
    return out;
}

}  // namespace kt
