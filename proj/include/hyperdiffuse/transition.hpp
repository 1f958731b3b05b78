#pragma once

#include <Eigen/SparseCore>
#include <iosfwd>

#include "hyperdiffuse/hypergraph.hpp"

namespace hyperdiffuse {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Degree-modulation function rho(x) = x^sigma with rho(0) := 0.
/// The zero case keeps sigma < 0 finite: a zero-degree hyperedge always
/// multiplies a zero Q entry anyway.
struct RhoFunction {
    double sigma = 0.0;

    double operator()(double x) const;
};

/// Symmetric hypergraph transition operator.
///
/// renormalized == true: T~ = D~^{-1/2} (Q W rho(D_E) Q^T + I) D~^{-1/2}
/// with d~(v) = 1 + sum_e w(e) Q(v,e) delta(e) rho(delta(e)).
/// renormalized == false drops the identity terms; isolated vertices then
/// get all-zero rows and columns.
struct TransitionMatrix {
    SparseMatrix matrix;
    Vector vertex_degrees;  // d~(v) (renormalized) or d(v)
    Vector edge_degrees;    // delta(e) = sum_v Q(v,e)
    bool renormalized = true;

    int rows() const { return static_cast<int>(matrix.rows()); }
};

/// Builds the transition matrix. Symmetry is exact: every entry is computed
/// once for the upper triangle and mirrored. With renormalize == false a
/// warning listing the zero-degree vertices is logged. Throws NonFiniteRho
/// if rho(delta(e)) overflows.
TransitionMatrix build_transition(const Hypergraph& h, const RhoFunction& rho, bool renormalize);

/// Induced l1 norm: max over rows of the absolute row sum.
double l1_norm(const TransitionMatrix& t);

/// Proposition-style bound d_T = sqrt(1 + rho_max * E * D) on the l1 norm of
/// the renormalized matrix. rho_max is taken over the achieved hyperedge
/// degrees delta(e) (the continuous interval is ill-defined for sigma < 0).
double prop1_bound(const Hypergraph& h, const RhoFunction& rho);

/// MatrixMarket coordinate text export.
void write_matrix_market(const TransitionMatrix& t, std::ostream& os);

}  // namespace hyperdiffuse
