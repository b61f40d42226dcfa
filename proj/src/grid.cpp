#include "kirchlog/grid.hpp"

#include "kirchlog/errors.hpp"

#include <cmath>
#include <sstream>

namespace kirchlog {

void ModelParams::validate() const {
    std::ostringstream msg;
    if (!(a > 0.0)) msg << "a must be positive (got " << a << "); ";
    if (!(b > 0.0)) msg << "b must be positive (got " << b << "); ";
    if (k != 0 && k != 1) msg << "k must be 0 or 1 (got " << k << "); ";
    if (!(p >= 2.0)) msg << "p must be >= 2 (got " << p << "); ";
    if (!(length > 0.0)) msg << "L must be positive (got " << length << "); ";
    if (!(q > 2.0 * p - 1.0)) {
        msg << "q must exceed 2p - 1 = " << 2.0 * p - 1.0 << " (got " << q
            << "); in one dimension p >= n so the Sobolev conjugate is "
               "infinite and no upper bound on q is enforced; ";
    }
    const std::string s = msg.str();
    if (!s.empty()) throw ParameterError("invalid model parameters: " + s.substr(0, s.size() - 2));
}

Grid::Grid(int interior_nodes, double length)
    : n_(interior_nodes), length_(length), h_(length / (interior_nodes + 1)) {
    if (interior_nodes < 2) throw ParameterError("grid needs at least 2 interior nodes");
    if (!(length > 0.0)) throw ParameterError("grid length must be positive");
}

Field Grid::nodes() const {
    Field x(n_);
    for (int i = 0; i < n_; ++i) x[i] = node(i);
    return x;
}

void Grid::check(const Field& u) const {
    if (u.size() != n_) {
        std::ostringstream msg;
        msg << "field has " << u.size() << " entries but the grid has " << n_ << " interior nodes";
        throw StructuralError(msg.str());
    }
}

void Grid::check_finite(const Field& u) const {
    check(u);
    if (!u.allFinite()) throw DomainError("field contains non-finite values");
}

double p_flux(double s, double p) {
    if (p == 2.0) return s;
    if (s == 0.0) return 0.0;
    return std::pow(std::abs(s), p - 2.0) * s;
}

EdgeValues gradient_values(const Field& u, const Grid& g) {
    g.check(u);
    const int n = g.size();
    const double inv_h = 1.0 / g.spacing();
    EdgeValues d(n + 1);
    d[0] = u[0] * inv_h;
    for (int j = 1; j < n; ++j) d[j] = (u[j] - u[j - 1]) * inv_h;
    d[n] = -u[n - 1] * inv_h;
    return d;
}

Field p_laplacian(const Field& u, const Grid& g, double p) {
    const EdgeValues d = gradient_values(u, g);
    const int n = g.size();
    const double inv_h = 1.0 / g.spacing();
    Field out(n);
    double left = p_flux(d[0], p);
    for (int i = 0; i < n; ++i) {
        const double right = p_flux(d[i + 1], p);
        out[i] = (right - left) * inv_h;
        left = right;
    }
    return out;
}

Field laplacian(const Field& u, const Grid& g) {
    g.check(u);
    const int n = g.size();
    const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
    Field out(n);
    for (int i = 0; i < n; ++i) {
        const double left = i > 0 ? u[i - 1] : 0.0;
        const double right = i + 1 < n ? u[i + 1] : 0.0;
        out[i] = (left - 2.0 * u[i] + right) * inv_h2;
    }
    return out;
}

namespace {

double abs_pow_sum(const Eigen::VectorXd& v, double r) {
    double s = 0.0;
    if (r == 2.0) return v.squaredNorm();
    for (double x : v) {
        if (x != 0.0) s += std::pow(std::abs(x), r);
    }
    return s;
}

void require_exponent(double r) {
    if (!(r >= 1.0)) throw ParameterError("norm exponent must be >= 1");
}

}  // namespace

double power_integral(const Field& u, const Grid& g, double r) {
    g.check(u);
    return g.spacing() * abs_pow_sum(u, r);
}

double grad_power_integral(const Field& u, const Grid& g, double r) {
    return g.spacing() * abs_pow_sum(gradient_values(u, g), r);
}

double norm_r(const Field& u, const Grid& g, double r) {
    require_exponent(r);
    return std::pow(power_integral(u, g, r), 1.0 / r);
}

double grad_norm_r(const Field& u, const Grid& g, double r) {
    require_exponent(r);
    return std::pow(grad_power_integral(u, g, r), 1.0 / r);
}

double inner(const Field& u, const Field& v, const Grid& g) {
    g.check(u);
    g.check(v);
    return g.spacing() * u.dot(v);
}

double log_power_integral(const Field& u, const Grid& g, double q) {
    g.check(u);
    double s = 0.0;
    for (double x : u) {
        const double ax = std::abs(x);
        if (ax != 0.0) s += std::pow(ax, q + 1.0) * std::log(ax);
    }
    return g.spacing() * s;
}

double log_source(double s, double q) {
    if (s == 0.0) return 0.0;
    const double as = std::abs(s);
    return std::pow(as, q - 1.0) * s * std::log(as);
}

Field log_source(const Field& u, double q) {
    Field f(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) f[i] = log_source(u[i], q);
    return f;
}

double log_source_derivative(double s, double q) {
    if (s == 0.0) return 0.0;
    const double as = std::abs(s);
    return std::pow(as, q - 1.0) * (q * std::log(as) + 1.0);
}

}  // namespace kirchlog
