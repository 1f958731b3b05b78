#include "hyperdiffuse/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <unordered_set>

#include "hyperdiffuse/errors.hpp"

namespace hyperdiffuse {

HypergraphStats validate(const Hypergraph& h) {
    if (h.num_vertices <= 0)
        throw IndexOutOfRange("hypergraph must have a positive vertex count");
    if (h.edge_weights.size() != h.hyperedges.size())
        throw WeightOutOfRange("edge_weights size does not match hyperedge count");

    HypergraphStats stats;
    std::vector<int> degree(h.num_vertices, 0);
    std::unordered_set<int> seen;

    for (size_t e = 0; e < h.hyperedges.size(); ++e) {
        const Hyperedge& edge = h.hyperedges[e];
        if (edge.empty())
            throw EmptyHyperedge("hyperedge " + std::to_string(e) + " is empty");
        const double w = h.edge_weights[e];
        if (!(w >= 0.0 && w <= 1.0))
            throw WeightOutOfRange("w(e) out of [0,1] for hyperedge " + std::to_string(e));
        seen.clear();
        for (const VertexEntry& ve : edge) {
            if (ve.vertex < 0 || ve.vertex >= h.num_vertices)
                throw IndexOutOfRange("vertex " + std::to_string(ve.vertex) +
                                      " out of range in hyperedge " + std::to_string(e));
            if (!seen.insert(ve.vertex).second)
                throw EmptyHyperedge("duplicate vertex " + std::to_string(ve.vertex) +
                                     " in hyperedge " + std::to_string(e));
            if (!(ve.q >= 0.0 && ve.q <= 1.0) || !std::isfinite(ve.q))
                throw WeightOutOfRange("Q(v,e) out of [0,1] for vertex " +
                                       std::to_string(ve.vertex) + " in hyperedge " +
                                       std::to_string(e));
            ++degree[ve.vertex];
        }
        stats.max_edge_size = std::max(stats.max_edge_size, static_cast<int>(edge.size()));
    }

    for (int v = 0; v < h.num_vertices; ++v) {
        stats.max_vertex_degree = std::max(stats.max_vertex_degree, degree[v]);
        if (degree[v] == 0) stats.isolated_vertices.push_back(v);
    }
    return stats;
}

namespace {

// Mean Euclidean distance over unordered vertex pairs. Above 10^6 pairs the
// mean is estimated from 10^6 pairs drawn with a fixed seed.
double mean_pairwise_distance(const Matrix& X) {
    const long n = X.rows();
    const long total_pairs = n * (n - 1) / 2;
    constexpr long kMaxPairs = 1'000'000;

    double sum = 0.0;
    long count = 0;
    if (total_pairs <= kMaxPairs) {
        for (long i = 0; i < n; ++i)
            for (long j = i + 1; j < n; ++j) {
                sum += (X.row(i) - X.row(j)).norm();
                ++count;
            }
    } else {
        std::mt19937_64 rng(0x5eed5eedULL);
        for (; count < kMaxPairs; ++count) {
            long i = static_cast<long>(rng() % static_cast<unsigned long>(n));
            long j = static_cast<long>(rng() % static_cast<unsigned long>(n - 1));
            if (j >= i) ++j;
            sum += (X.row(i) - X.row(j)).norm();
        }
    }
    return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace

Hypergraph build_knn_hypergraph(const Matrix& X, int k, double gamma) {
    const int n = static_cast<int>(X.rows());
    if (n < 1) throw DimensionMismatch("feature matrix has no rows");
    if (k < 1 || k >= n)
        throw IndexOutOfRange("k must satisfy 1 <= k < N (k=" + std::to_string(k) +
                              ", N=" + std::to_string(n) + ")");
    if (!(gamma > 0.0)) throw WeightOutOfRange("gamma must be positive");
    check_features(X, n);

    const double dhat = mean_pairwise_distance(X);
    if (dhat == 0.0)
        throw DegenerateFeatures("all pairwise feature distances are zero");
    const double scale = gamma * dhat * dhat;

    Hypergraph h;
    h.num_vertices = n;
    h.hyperedges.reserve(n);
    h.edge_weights.assign(n, 1.0);

    std::vector<std::pair<double, int>> dist(n);
    for (int c = 0; c < n; ++c) {
        for (int v = 0; v < n; ++v)
            dist[v] = {(X.row(v) - X.row(c)).norm(), v};
        // centroid itself has distance 0 and always sorts first; ties by index
        std::sort(dist.begin(), dist.end());

        Hyperedge edge;
        edge.reserve(k + 1);
        for (int r = 0; r <= k; ++r) {
            const double q = std::exp(-dist[r].first / scale);
            edge.push_back({dist[r].second, std::clamp(q, 0.0, 1.0)});
        }
        std::sort(edge.begin(), edge.end(),
                  [](const VertexEntry& a, const VertexEntry& b) { return a.vertex < b.vertex; });
        h.hyperedges.push_back(std::move(edge));
    }
    return h;
}

Hypergraph concat_multimodal(const std::vector<Hypergraph>& hs) {
    if (hs.empty()) throw VertexCountMismatch("concat_multimodal needs at least one input");
    Hypergraph out;
    out.num_vertices = hs.front().num_vertices;
    for (const Hypergraph& h : hs) {
        if (h.num_vertices != out.num_vertices)
            throw VertexCountMismatch("hypergraphs disagree on vertex count (" +
                                      std::to_string(h.num_vertices) + " vs " +
                                      std::to_string(out.num_vertices) + ")");
        out.hyperedges.insert(out.hyperedges.end(), h.hyperedges.begin(), h.hyperedges.end());
        out.edge_weights.insert(out.edge_weights.end(), h.edge_weights.begin(),
                                h.edge_weights.end());
    }
    return out;
}

int count_classes(const std::vector<int>& labels) {
    int max_label = -1;
    for (int y : labels)
        if (y != kUnlabeled) max_label = std::max(max_label, y);
    return max_label + 1;
}

void check_features(const Matrix& X, int num_vertices) {
    if (X.rows() != num_vertices)
        throw DimensionMismatch("feature matrix has " + std::to_string(X.rows()) +
                                " rows, hypergraph has " + std::to_string(num_vertices) +
                                " vertices");
    if (!X.allFinite()) throw DimensionMismatch("feature matrix contains non-finite entries");
}

}  // namespace hyperdiffuse
