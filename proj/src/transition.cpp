#include "hyperdiffuse/transition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "hyperdiffuse/errors.hpp"
#include "hyperdiffuse/log.hpp"

namespace hyperdiffuse {

double RhoFunction::operator()(double x) const {
    if (x == 0.0) return 0.0;
    if (sigma == 0.0) return 1.0;
    return std::pow(x, sigma);
}

TransitionMatrix build_transition(const Hypergraph& h, const RhoFunction& rho,
                                  bool renormalize) {
    validate(h);
    const int n = h.num_vertices;
    const int m = h.num_edges();

    TransitionMatrix t;
    t.renormalized = renormalize;
    t.edge_degrees = Vector::Zero(m);

    std::vector<double> rho_delta(m, 0.0);
    for (int e = 0; e < m; ++e) {
        double delta = 0.0;
        for (const VertexEntry& ve : h.hyperedges[e]) delta += ve.q;
        t.edge_degrees[e] = delta;
        rho_delta[e] = rho(delta);
        if (!std::isfinite(rho_delta[e]))
            throw NonFiniteRho("rho(delta) not finite for hyperedge " + std::to_string(e) +
                               " (delta=" + std::to_string(delta) +
                               ", sigma=" + std::to_string(rho.sigma) + ")");
    }

    // d(v) = sum_e w(e) Q(v,e) delta(e) rho(delta(e)); renormalization adds 1.
    Vector deg = renormalize ? Vector::Ones(n) : Vector::Zero(n);
    for (int e = 0; e < m; ++e) {
        const double coeff = h.edge_weights[e] * t.edge_degrees[e] * rho_delta[e];
        for (const VertexEntry& ve : h.hyperedges[e]) deg[ve.vertex] += ve.q * coeff;
    }
    t.vertex_degrees = deg;

    if (!renormalize) {
        std::string zeros;
        for (int v = 0; v < n; ++v)
            if (deg[v] == 0.0) zeros += (zeros.empty() ? "" : " ") + std::to_string(v);
        if (!zeros.empty())
            log_warn("zero-degree vertices with renormalize=false, rows will be zero: " + zeros);
    }

    // Upper triangle of Q W rho(D_E) Q^T (+I), accumulated per entry in edge
    // order so the summation is deterministic.
    std::map<std::pair<int, int>, double> upper;
    for (int e = 0; e < m; ++e) {
        const double coeff = h.edge_weights[e] * rho_delta[e];
        if (coeff == 0.0) continue;
        const Hyperedge& edge = h.hyperedges[e];
        for (size_t a = 0; a < edge.size(); ++a) {
            for (size_t b = a; b < edge.size(); ++b) {
                int u = edge[a].vertex, v = edge[b].vertex;
                if (u > v) std::swap(u, v);
                upper[{u, v}] += coeff * edge[a].q * edge[b].q;
            }
        }
    }
    if (renormalize)
        for (int v = 0; v < n; ++v) upper[{v, v}] += 1.0;

    Vector inv_sqrt(n);
    for (int v = 0; v < n; ++v)
        inv_sqrt[v] = deg[v] > 0.0 ? 1.0 / std::sqrt(deg[v]) : 0.0;

    // Each off-diagonal value is computed once and mirrored, so
    // T(i,j) == T(j,i) holds exactly.
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(2 * upper.size());
    for (const auto& [key, value] : upper) {
        const auto [u, v] = key;
        const double scaled = value * inv_sqrt[u] * inv_sqrt[v];
        if (scaled == 0.0) continue;
        triplets.emplace_back(u, v, scaled);
        if (u != v) triplets.emplace_back(v, u, scaled);
    }
    t.matrix.resize(n, n);
    t.matrix.setFromTriplets(triplets.begin(), triplets.end());
    t.matrix.makeCompressed();
    return t;
}

double l1_norm(const TransitionMatrix& t) {
    double best = 0.0;
    for (int i = 0; i < t.matrix.outerSize(); ++i) {
        double row = 0.0;
        for (SparseMatrix::InnerIterator it(t.matrix, i); it; ++it) row += std::abs(it.value());
        best = std::max(best, row);
    }
    return best;
}

double prop1_bound(const Hypergraph& h, const RhoFunction& rho) {
    const HypergraphStats stats = validate(h);
    double rho_max = 0.0;
    for (const Hyperedge& edge : h.hyperedges) {
        double delta = 0.0;
        for (const VertexEntry& ve : edge) delta += ve.q;
        rho_max = std::max(rho_max, rho(delta));
    }
    return std::sqrt(1.0 + rho_max * static_cast<double>(stats.max_edge_size) *
                               static_cast<double>(stats.max_vertex_degree));
}

void write_matrix_market(const TransitionMatrix& t, std::ostream& os) {
    os << "%%MatrixMarket matrix coordinate real symmetric\n";
    long nnz_lower = 0;
    char buf[64];
    for (int i = 0; i < t.matrix.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(t.matrix, i); it; ++it)
            if (it.row() >= it.col()) ++nnz_lower;
    os << t.matrix.rows() << " " << t.matrix.cols() << " " << nnz_lower << "\n";
    for (int i = 0; i < t.matrix.outerSize(); ++i) {
        for (SparseMatrix::InnerIterator it(t.matrix, i); it; ++it) {
            if (it.row() < it.col()) continue;
            std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n", static_cast<long>(it.row()) + 1,
                          static_cast<long>(it.col()) + 1, it.value());
            os << buf;
        }
    }
}

}  // namespace hyperdiffuse
