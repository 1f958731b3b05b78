#pragma once

#include "hyperdiffuse/transition.hpp"

namespace hyperdiffuse {

/// Parameters of the discounted Markov diffusion:
/// discount alpha in (0,1], blend beta in [0,1], steps t >= 1.
struct DiffusionParams {
    double alpha = 1.0;
    double beta = 1.0;
    int steps = 1;
};

inline constexpr int kDefaultDenseCap = 5000;

/// The operator A(t) = beta * Z(t) + (1-beta) * I with
/// Z(t) = (1/t) * sum_{tau=1..t} alpha^tau T~^tau, applied matrix-free.
class DiffusionOperator {
  public:
    DiffusionOperator(TransitionMatrix transition, DiffusionParams params);

    const DiffusionParams& params() const { return params_; }
    const TransitionMatrix& transition() const { return transition_; }
    int size() const { return transition_.rows(); }

    /// A(t) * X by iterated sparse matvec; the tau-sum is accumulated in
    /// ascending order and T~^tau is never materialized. beta == 0 returns X
    /// unchanged (A(t) is the identity then).
    Matrix apply(const Matrix& X) const;

    /// Dense materialization of A(t), guarded by the size cap.
    Matrix dense(int dense_cap = kDefaultDenseCap) const;

  private:
    TransitionMatrix transition_;
    DiffusionParams params_;
};

enum class KernelKind { original, markov, learnable };

struct KernelMatrix {
    Matrix values;
    KernelKind kind = KernelKind::markov;
};

/// A(t) * X. Free-function spelling of DiffusionOperator::apply.
Matrix apply_diffusion(const DiffusionOperator& op, const Matrix& X);

/// Pre-activation hidden representations A(t) * X * Theta; row i is the
/// projected representation of vertex i.
Matrix projection(const DiffusionOperator& op, const Matrix& X, const Matrix& theta);

/// Kernel Phi Phi^T with Phi = A(t) X Theta. Theta == nullptr uses the
/// implicit identity (the plain diffusion kernel); with beta == 0 as well the
/// result is the instinctive kernel X X^T. Dense N x N output, guarded by
/// dense_cap.
KernelMatrix kernel_matrix(const DiffusionOperator& op, const Matrix& X,
                           const Matrix* theta = nullptr, int dense_cap = kDefaultDenseCap);

/// ||Phi_i - Phi_j||_2 for the projection above, computed from two
/// unit-vector diffusion chains rather than the full kernel.
double diffusion_distance(const DiffusionOperator& op, const Matrix& X, const Matrix* theta,
                          int i, int j);

}  // namespace hyperdiffuse
