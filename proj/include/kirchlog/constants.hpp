#pragma once

#include "kirchlog/grid.hpp"

#include <cstdint>
#include <string>

namespace kirchlog {

/// Discrete embedding constants on a fixed grid. Ratio constants are lower
/// bounds on the discrete best constant (the best ratio actually attained);
/// Cstar and Clower are closed-form and exact/upper resp. lower bounds.
struct EmbeddingConstants {
    double S = 0.0;       // |u|_{q+2} <= S |u_x|_p
    double S1 = 0.0;      // |u|_{q+1} <= S1 |u_x|_p
    double betaGN = 0.0;  // |u|_{q+2} <= beta |u|_2^{1-theta} |u_x|_p^theta
    double theta = 0.0;
    double Cstar = 0.0;   // |u_x|_2 <= Cstar |u_x|_p
    double Clower = 0.0;  // Clower |u|_2 <= |u_x|_2
    double Kp = 0.0;      // Kp (x^p + y^p) >= (x + y)^p
};

enum class ConstantKind { S, S1, BetaGN, Theta, Cstar, Clower, Kp };

std::string to_string(ConstantKind kind);

struct ConstantOptions {
    int restarts = 8;
    std::uint64_t seed = 1;
    int max_iterations = 20000;  // the Gagliardo-Nirenberg ratio ascends slowly
    double tol = 1e-13;
};

/// theta with theta (1/2 - 1/p + 1/n) = 1/2 - 1/(q+2), n = 1.
double gn_theta(const ModelParams& params);

double estimate_constant(ConstantKind kind, const ModelParams& params, const Grid& g,
                         const ConstantOptions& opts = {});

EmbeddingConstants estimate_embedding_constants(const ModelParams& params, const Grid& g,
                                                const ConstantOptions& opts = {});

/// r(delta) = (delta a / S^{q+2})^{1/(q+2-p)}: below this gradient norm,
/// I_delta is positive.
double r_of_delta(double delta, const EmbeddingConstants& c, const ModelParams& params);

/// f(y) = b(q+1-2p)/(2p(q+1)) y^{2p} + a(q+1-p)/(p(q+1)) y^p + S1^{q+1}/(q+1)^2 y^{q+1}
double f_of_y(double y, const EmbeddingConstants& c, const ModelParams& params);

/// Unique y > 0 with f(y) = target, by bisection.
double kappa_root(double target, const EmbeddingConstants& c, const ModelParams& params);

/// Upper bound on |u_x|_p over Nehari points with J < s:
/// (p s (q+1) / (a (q+1-p)))^{1/p}.
double kappa_tilde(double s, const ModelParams& params);

/// Lower bound on inf{|u|_2^2 + k|u_x|_2^2 : u Nehari, J(u) < s}. The
/// branch is selected by the sign of p - theta (q+2).
double lambda_s_lower_bound(double s, double d, const EmbeddingConstants& c,
                            const ModelParams& params);

/// Upper bound (1 + k) |Omega|^{(p-2)/p} kappa_tilde^2 on the matching
/// supremum. Uses |u|_2 <= |u_x|_2, i.e. a first Dirichlet eigenvalue >= 1.
double Lambda_s_upper_bound(double s, double d, const ModelParams& params);

/// gamma = min{b / (2 k^p Cstar^{2p}), b Clower^{2p} / (2 Cstar^{2p})};
/// the first entry is dropped when k = 0.
double decay_gamma(const EmbeddingConstants& c, const ModelParams& params);

}  // namespace kirchlog
