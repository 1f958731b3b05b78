#include "hyperdiffuse/diffusion.hpp"

#include <cmath>
#include <string>

#include "hyperdiffuse/errors.hpp"

namespace hyperdiffuse {

DiffusionOperator::DiffusionOperator(TransitionMatrix transition, DiffusionParams params)
    : transition_(std::move(transition)), params_(params) {
    if (!(params_.alpha > 0.0 && params_.alpha <= 1.0))
        throw DimensionMismatch("alpha must be in (0,1], got " + std::to_string(params_.alpha));
    if (!(params_.beta >= 0.0 && params_.beta <= 1.0))
        throw DimensionMismatch("beta must be in [0,1], got " + std::to_string(params_.beta));
    if (params_.steps < 1)
        throw DimensionMismatch("steps must be >= 1, got " + std::to_string(params_.steps));
}

Matrix DiffusionOperator::apply(const Matrix& X) const {
    if (X.rows() != transition_.rows())
        throw DimensionMismatch("X has " + std::to_string(X.rows()) + " rows, operator is " +
                                std::to_string(transition_.rows()) + " x " +
                                std::to_string(transition_.rows()));
    if (params_.beta == 0.0) return X;

    Matrix power = X;                               // T~^tau X
    Matrix acc = Matrix::Zero(X.rows(), X.cols());  // sum alpha^tau T~^tau X
    double alpha_pow = 1.0;
    for (int tau = 1; tau <= params_.steps; ++tau) {
        power = transition_.matrix * power;
        alpha_pow *= params_.alpha;
        acc += alpha_pow * power;
    }
    return params_.beta / static_cast<double>(params_.steps) * acc + (1.0 - params_.beta) * X;
}

Matrix DiffusionOperator::dense(int dense_cap) const {
    const int n = size();
    if (n > dense_cap)
        throw SizeCapExceeded("dense operator for N=" + std::to_string(n) + " exceeds cap " +
                              std::to_string(dense_cap));
    Matrix t_dense = Matrix(transition_.matrix);
    Matrix power = Matrix::Identity(n, n);
    Matrix acc = Matrix::Zero(n, n);
    double alpha_pow = 1.0;
    for (int tau = 1; tau <= params_.steps; ++tau) {
        power = t_dense * power;
        alpha_pow *= params_.alpha;
        acc += alpha_pow * power;
    }
    return params_.beta / static_cast<double>(params_.steps) * acc +
           (1.0 - params_.beta) * Matrix::Identity(n, n);
}

Matrix apply_diffusion(const DiffusionOperator& op, const Matrix& X) { return op.apply(X); }

Matrix projection(const DiffusionOperator& op, const Matrix& X, const Matrix& theta) {
    if (theta.rows() != X.cols())
        throw DimensionMismatch("Theta has " + std::to_string(theta.rows()) +
                                " rows, X has " + std::to_string(X.cols()) + " columns");
    return op.apply(X) * theta;
}

KernelMatrix kernel_matrix(const DiffusionOperator& op, const Matrix& X, const Matrix* theta,
                           int dense_cap) {
    const int n = op.size();
    if (n > dense_cap)
        throw SizeCapExceeded("kernel for N=" + std::to_string(n) + " exceeds cap " +
                              std::to_string(dense_cap));
    Matrix phi = theta != nullptr ? projection(op, X, *theta) : op.apply(X);

    KernelMatrix k;
    // Rank update keeps the product exactly symmetric.
    k.values = Matrix::Zero(n, n);
    k.values.selfadjointView<Eigen::Lower>().rankUpdate(phi);
    k.values.triangularView<Eigen::StrictlyUpper>() =
        k.values.triangularView<Eigen::StrictlyLower>().transpose();
    k.kind = theta != nullptr          ? KernelKind::learnable
             : op.params().beta == 0.0 ? KernelKind::original
                                       : KernelKind::markov;
    return k;
}

double diffusion_distance(const DiffusionOperator& op, const Matrix& X, const Matrix* theta,
                          int i, int j) {
    const int n = op.size();
    if (i < 0 || i >= n || j < 0 || j >= n)
        throw IndexOutOfRange("vertex index out of range for diffusion_distance");
    if (i == j) return 0.0;

    // phi_i = e_i^T A(t) X Theta = (A(t) e_i)^T X Theta since A(t) is symmetric.
    Matrix basis = Matrix::Zero(n, 2);
    basis(i, 0) = 1.0;
    basis(j, 1) = 1.0;
    Matrix cols = op.apply(basis);
    Eigen::RowVectorXd diff = (cols.col(0) - cols.col(1)).transpose() * X;
    if (theta != nullptr) {
        if (theta->rows() != X.cols())
            throw DimensionMismatch("Theta rows do not match feature dimension");
        return (diff * (*theta)).norm();
    }
    return diff.norm();
}

}  // namespace hyperdiffuse
