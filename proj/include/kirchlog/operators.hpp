#pragma once

#include "kirchlog/grid.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <memory>

namespace kirchlog {

/// Stiffness matrix K = -Delta_h (3-point, Dirichlet), so that
/// h u^T K v = h sum_j D u_j D v_j.
Eigen::SparseMatrix<double> stiffness_matrix(const Grid& g);

/// Factored SPD operator mass * I + stiff * K. Built once per grid and
/// reused for every solve.
class SpdOperator {
public:
    SpdOperator(const Grid& g, double mass, double stiff);

    Field solve(const Field& rhs) const;
    Field apply(const Field& v) const;
    Eigen::MatrixXd dense() const;

private:
    Eigen::SparseMatrix<double> matrix_;
    std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> factor_;
};

/// Dense Jacobian of u -> Delta_p u.
Eigen::MatrixXd p_laplacian_jacobian(const Field& u, const Grid& g, double p);

/// Dense Jacobian of u -> M(|u_x|_p^p) Delta_p u + f(u). The Kirchhoff factor
/// contributes a rank-one term.
Eigen::MatrixXd stationary_jacobian(const Field& u, const ModelParams& params, const Grid& g);

/// sup_phi (r, phi) / |phi_x|_2 = sqrt(h r^T K^{-1} r).
double dual_norm(const Field& r, const Grid& g, const SpdOperator& stiffness);

}  // namespace kirchlog
