#include "kirchlog/operators.hpp"

#include "kirchlog/errors.hpp"

#include <cmath>
#include <vector>

namespace kirchlog {

Eigen::SparseMatrix<double> stiffness_matrix(const Grid& g) {
    const int n = g.size();
    const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(3 * n);
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, 2.0 * inv_h2);
        if (i > 0) t.emplace_back(i, i - 1, -inv_h2);
        if (i + 1 < n) t.emplace_back(i, i + 1, -inv_h2);
    }
    Eigen::SparseMatrix<double> k(n, n);
    k.setFromTriplets(t.begin(), t.end());
    return k;
}

SpdOperator::SpdOperator(const Grid& g, double mass, double stiff) {
    if (mass < 0.0 || stiff < 0.0 || mass + stiff <= 0.0)
        throw ParameterError("mass/stiffness weights must be nonnegative and not both zero");
    Eigen::SparseMatrix<double> id(g.size(), g.size());
    id.setIdentity();
    matrix_ = mass * id + stiff * stiffness_matrix(g);
    factor_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(matrix_);
    if (factor_->info() != Eigen::Success) throw Error("SPD factorisation failed");
}

Field SpdOperator::solve(const Field& rhs) const { return factor_->solve(rhs); }

Field SpdOperator::apply(const Field& v) const { return matrix_ * v; }

Eigen::MatrixXd SpdOperator::dense() const { return Eigen::MatrixXd(matrix_); }

Eigen::MatrixXd p_laplacian_jacobian(const Field& u, const Grid& g, double p) {
    const EdgeValues d = gradient_values(u, g);
    const int n = g.size();
    const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
    // phi'(s) = (p - 1) |s|^{p-2}
    Eigen::VectorXd w(n + 1);
    for (int j = 0; j <= n; ++j) {
        w[j] = p == 2.0 ? 1.0 : (p - 1.0) * std::pow(std::abs(d[j]), p - 2.0);
    }
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        jac(i, i) = -(w[i] + w[i + 1]) * inv_h2;
        if (i > 0) jac(i, i - 1) = w[i] * inv_h2;
        if (i + 1 < n) jac(i, i + 1) = w[i + 1] * inv_h2;
    }
    return jac;
}

Eigen::MatrixXd stationary_jacobian(const Field& u, const ModelParams& params, const Grid& g) {
    const double p = params.p;
    const double gp = grad_power_integral(u, g, p);
    const Field lap = p_laplacian(u, g, p);
    Eigen::MatrixXd jac = params.kirchhoff(gp) * p_laplacian_jacobian(u, g, p);
    // d gradP / du_i = -p h (Delta_p u)_i
    jac.noalias() += params.b * lap * (-p * g.spacing() * lap).transpose();
    for (int i = 0; i < g.size(); ++i) jac(i, i) += log_source_derivative(u[i], params.q);
    return jac;
}

double dual_norm(const Field& r, const Grid& g, const SpdOperator& stiffness) {
    const Field z = stiffness.solve(r);
    return std::sqrt(std::max(0.0, g.spacing() * r.dot(z)));
}

}  // namespace kirchlog
