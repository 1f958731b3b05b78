#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace hyperdiffuse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One (vertex index, Q(v,e)) entry of a hyperedge. Q is the edge-dependent
/// vertex weight; zero weight is allowed for a listed member.
struct VertexEntry {
    int vertex;
    double q;
};

using Hyperedge = std::vector<VertexEntry>;

/// Sparse hypergraph: vertices are 0..num_vertices-1, each hyperedge stores
/// its incident vertices with their Q weights, and edge_weights holds the
/// diagonal of the prior hyperedge weight matrix W.
struct Hypergraph {
    int num_vertices = 0;
    std::vector<Hyperedge> hyperedges;
    std::vector<double> edge_weights;

    int num_edges() const { return static_cast<int>(hyperedges.size()); }
};

/// Structural statistics computed by validate().
struct HypergraphStats {
    int max_edge_size = 0;      // E: max number of vertices in any hyperedge
    int max_vertex_degree = 0;  // D: max number of hyperedges incident to any vertex
    std::vector<int> isolated_vertices;
};

/// Checks all structural invariants (indices in range, no empty hyperedge,
/// no duplicate vertex within an edge, Q and w in [0,1]) and returns E, D
/// and the isolated-vertex set. Throws IndexOutOfRange, EmptyHyperedge or
/// WeightOutOfRange on violation.
HypergraphStats validate(const Hypergraph& h);

/// One hyperedge per vertex: the centroid plus its k nearest neighbors by
/// Euclidean feature distance, ties broken by ascending index. Vertex weights
/// are Q(v,e) = exp(-d(v,v_c) / (gamma * dhat^2)) with dhat the mean pairwise
/// distance (subsampled above 10^6 pairs, fixed seed). All edge weights are 1.
/// Throws DegenerateFeatures when every pairwise distance is zero.
Hypergraph build_knn_hypergraph(const Matrix& X, int k, double gamma);

/// Concatenates the hyperedge lists of several hypergraphs over the same
/// vertex set (multi-modal Q = [Q_1, Q_2, ...]). Throws VertexCountMismatch.
Hypergraph concat_multimodal(const std::vector<Hypergraph>& hs);

/// Unlabeled-vertex sentinel in label vectors.
inline constexpr int kUnlabeled = -1;

/// Number of classes implied by a label vector: 1 + max label id.
/// Sentinel entries are ignored.
int count_classes(const std::vector<int>& labels);

/// Throws DimensionMismatch if X does not have one row per vertex or
/// contains non-finite entries.
void check_features(const Matrix& X, int num_vertices);

}  // namespace hyperdiffuse
