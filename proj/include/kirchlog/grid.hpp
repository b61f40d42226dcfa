#pragma once

#include <Eigen/Core>

#include <string>

namespace kirchlog {

/// Nodal values on the interior of a Dirichlet grid. Boundary values are
/// implicitly zero and never stored.
using Field = Eigen::VectorXd;

/// Values on the N+1 cells of a grid (difference quotients, fluxes).
using EdgeValues = Eigen::VectorXd;

/// Coefficients of the pseudo-parabolic Kirchhoff problem
///
///   u_t - k u_xxt - (a + b |u_x|_p^p) (|u_x|^{p-2} u_x)_x = |u|^{q-1} u log|u|
///
/// on (0, L) with homogeneous Dirichlet data. The spatial dimension is fixed
/// to one.
struct ModelParams {
    static constexpr int dimension = 1;

    double a = 1.0;
    double b = 1.0;
    int k = 1;
    double p = 2.0;
    double q = 5.0;
    double length = 1.0;

    /// Throws ParameterError when a coefficient is out of range.
    void validate() const;

    /// Kirchhoff coefficient M(s) = a + b s.
    double kirchhoff(double s) const { return a + b * s; }

    /// |Omega|
    double measure() const { return length; }
};

/// Uniform grid with N interior nodes x_i = i h on (0, L), h = L / (N + 1).
class Grid {
public:
    Grid(int interior_nodes, double length);

    int size() const { return n_; }
    int cells() const { return n_ + 1; }
    double spacing() const { return h_; }
    double length() const { return length_; }
    double node(int i) const { return (i + 1) * h_; }  // i in [0, N)
    Field nodes() const;

    /// Throws StructuralError unless u has exactly size() entries.
    void check(const Field& u) const;
    void check_finite(const Field& u) const;

private:
    int n_;
    double length_;
    double h_;
};

/// phi(s) = |s|^{p-2} s
double p_flux(double s, double p);

/// Cell difference quotients D_j = (u_j - u_{j-1}) / h, j = 0..N, with the
/// zero extension at both ends.
EdgeValues gradient_values(const Field& u, const Grid& g);

/// Node i gets (phi(D_{i+1/2}) - phi(D_{i-1/2})) / h. For p = 2 this is the
/// three-point Laplacian.
Field p_laplacian(const Field& u, const Grid& g, double p);

/// Classical three-point Dirichlet Laplacian.
Field laplacian(const Field& u, const Grid& g);

/// h * sum |u_i|^r (no root taken).
double power_integral(const Field& u, const Grid& g, double r);
/// h * sum |D_j|^r over all cells.
double grad_power_integral(const Field& u, const Grid& g, double r);

double norm_r(const Field& u, const Grid& g, double r);
double grad_norm_r(const Field& u, const Grid& g, double r);
double inner(const Field& u, const Field& v, const Grid& g);

/// Quadrature of |u|^{q+1} log|u| with 0 log 0 = 0.
double log_power_integral(const Field& u, const Grid& g, double q);

/// Pointwise source f(s) = |s|^{q-1} s log|s|, f(0) = 0.
double log_source(double s, double q);
Field log_source(const Field& u, double q);
/// f'(s) = |s|^{q-1} (q log|s| + 1), f'(0) = 0 for q > 1.
double log_source_derivative(double s, double q);

}  // namespace kirchlog
