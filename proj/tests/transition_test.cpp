#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "generators.hpp"
#include "hyperdiffuse/errors.hpp"
#include "hyperdiffuse/transition.hpp"
#include "oracles.hpp"

using namespace hyperdiffuse;

TEST_CASE("rho function") {
    const RhoFunction identity{0.0};
    CHECK(identity(2.0) == 1.0);
    CHECK(identity(0.0) == 0.0);

    const RhoFunction inverse{-1.0};
    CHECK(inverse(2.0) == doctest::Approx(0.5));
    CHECK(inverse(0.0) == 0.0);  // defined away from the pole

    const RhoFunction square{2.0};
    CHECK(square(3.0) == doctest::Approx(9.0));
}

TEST_CASE("renormalized transition matrix on the reference hypergraph") {
    const Hypergraph h = gen::make_h3();
    const TransitionMatrix t = build_transition(h, RhoFunction{0.0}, true);

    CHECK(t.vertex_degrees(0) == doctest::Approx(3.0));
    CHECK(t.vertex_degrees(1) == doctest::Approx(5.0));
    CHECK(t.vertex_degrees(2) == doctest::Approx(3.0));
    CHECK(t.edge_degrees(0) == doctest::Approx(2.0));

    const Matrix dense = Matrix(t.matrix);
    CHECK(dense(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(dense(0, 1) == doctest::Approx(1.0 / std::sqrt(15.0)).epsilon(1e-12));
    CHECK(dense(1, 1) == doctest::Approx(3.0 / 5.0).epsilon(1e-12));
    CHECK(dense(0, 2) == 0.0);
}

TEST_CASE("isolated vertex with renormalization gets a unit self-loop") {
    Hypergraph h;
    h.num_vertices = 1;
    const TransitionMatrix t = build_transition(h, RhoFunction{0.0}, true);
    CHECK(Matrix(t.matrix)(0, 0) == doctest::Approx(1.0));
    CHECK(t.vertex_degrees(0) == 1.0);
    CHECK(l1_norm(t) == doctest::Approx(1.0));
}

TEST_CASE("non-renormalized form drops the self-loops") {
    const Hypergraph h = gen::make_h3();
    const TransitionMatrix t = build_transition(h, RhoFunction{0.0}, false);
    CHECK(t.vertex_degrees(0) == doctest::Approx(2.0));
    CHECK(t.vertex_degrees(1) == doctest::Approx(4.0));
    CHECK(t.vertex_degrees(2) == doctest::Approx(2.0));
    const Matrix expected = oracle::dense_transition(h, RhoFunction{0.0}, false);
    CHECK((Matrix(t.matrix) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("non-renormalized form zeroes the rows of isolated vertices") {
    Hypergraph h = gen::make_h3();
    h.num_vertices = 5;  // vertices 3, 4 isolated
    const TransitionMatrix t = build_transition(h, RhoFunction{0.0}, false);
    const Matrix dense = Matrix(t.matrix);
    CHECK(dense.row(3).cwiseAbs().maxCoeff() == 0.0);
    CHECK(dense.row(4).cwiseAbs().maxCoeff() == 0.0);
    CHECK(dense.col(3).cwiseAbs().maxCoeff() == 0.0);

    // renormalization restores a positive diagonal everywhere
    const TransitionMatrix tr = build_transition(h, RhoFunction{0.0}, true);
    const Matrix dr = Matrix(tr.matrix);
    for (int v = 0; v < 5; ++v) CHECK(dr(v, v) > 0.0);
}

TEST_CASE("l1 norm of the reference matrix") {
    const Hypergraph h = gen::make_h3();
    const TransitionMatrix t = build_transition(h, RhoFunction{0.0}, true);
    CHECK(l1_norm(t) == doctest::Approx(3.0 / 5.0 + 2.0 / std::sqrt(15.0)).epsilon(1e-12));
    CHECK(l1_norm(t) <= std::sqrt(5.0));
}

TEST_CASE("prop1_bound formula") {
    const Hypergraph h3 = gen::make_h3();
    CHECK(prop1_bound(h3, RhoFunction{0.0}) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));

    Hypergraph minimal;
    minimal.num_vertices = 1;
    minimal.hyperedges = {{{0, 1.0}}};
    minimal.edge_weights = {1.0};
    CHECK(prop1_bound(minimal, RhoFunction{0.0}) == doctest::Approx(std::sqrt(2.0)));

    // sigma = -0.5 with all achieved degrees 2: rho_max = 2^{-1/2}
    CHECK(prop1_bound(h3, RhoFunction{-0.5}) ==
          doctest::Approx(std::sqrt(1.0 + std::pow(2.0, -0.5) * 2.0 * 2.0)).epsilon(1e-12));
}

TEST_CASE("non-finite rho is rejected") {
    Hypergraph h = gen::make_h3();
    CHECK_THROWS_AS(build_transition(h, RhoFunction{4000.0}, true), NonFiniteRho);
}

TEST_CASE("property: sparse matrix equals the dense oracle and obeys the l1 bound") {
    std::mt19937_64 rng(2024);
    const double sigmas[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
    for (int trial = 0; trial < 60; ++trial) {
        const Hypergraph h = gen::random_hypergraph(rng);
        const RhoFunction rho{sigmas[trial % 5]};
        const TransitionMatrix t = build_transition(h, rho, true);

        const Matrix expected = oracle::dense_transition(h, rho, true);
        CHECK((Matrix(t.matrix) - expected).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(l1_norm(t) <= prop1_bound(h, rho) + 1e-12);
    }
}

TEST_CASE("property: stored triplets are exactly symmetric") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const Hypergraph h = gen::random_hypergraph(rng, 30, 40);
        const TransitionMatrix t = build_transition(h, RhoFunction{0.5}, true);
        std::map<std::pair<int, int>, double> entries;
        for (int i = 0; i < t.matrix.outerSize(); ++i)
            for (SparseMatrix::InnerIterator it(t.matrix, i); it; ++it)
                entries[{static_cast<int>(it.row()), static_cast<int>(it.col())}] = it.value();
        for (const auto& [key, value] : entries) {
            const auto mirror = entries.find({key.second, key.first});
            REQUIRE(mirror != entries.end());
            CHECK(mirror->second == value);  // bitwise equality
        }
    }
}

TEST_CASE("property: random walk oracle rows sum to one on binary hypergraphs") {
    std::mt19937_64 rng(321);
    for (int trial = 0; trial < 20; ++trial) {
        Hypergraph h = gen::random_hypergraph(rng, 20, 25);
        for (Hyperedge& edge : h.hyperedges)
            for (VertexEntry& ve : edge) ve.q = 1.0;
        for (double& w : h.edge_weights) w = 0.5 + 0.5 * w;  // keep weights positive
        // cover isolated vertices so every degree is positive
        const HypergraphStats stats = validate(h);
        for (int v : stats.isolated_vertices) {
            h.hyperedges.push_back({{v, 1.0}});
            h.edge_weights.push_back(1.0);
        }
        const Matrix p = oracle::dense_walk(h, RhoFunction{0.0});
        for (int u = 0; u < h.num_vertices; ++u)
            CHECK(p.row(u).sum() == doctest::Approx(1.0).epsilon(1e-12));

        // the symmetric form is the degree-similarity transform of the walk:
        // T = D^{1/2} P D^{-1/2}
        const TransitionMatrix t = build_transition(h, RhoFunction{0.0}, false);
        Vector sqrt_deg = t.vertex_degrees.cwiseSqrt();
        const Matrix similar =
            sqrt_deg.asDiagonal() * p * sqrt_deg.cwiseInverse().asDiagonal();
        CHECK((Matrix(t.matrix) - similar).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("matrix market export") {
    const Hypergraph h = gen::make_h3();
    const TransitionMatrix t = build_transition(h, RhoFunction{0.0}, true);
    std::stringstream ss;
    write_matrix_market(t, ss);
    std::string header;
    std::getline(ss, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real symmetric");
    int rows, cols, nnz;
    ss >> rows >> cols >> nnz;
    CHECK(rows == 3);
    CHECK(cols == 3);
    CHECK(nnz == 5);  // lower triangle of the 7 stored entries
}
