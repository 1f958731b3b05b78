#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <random>

#include "generators.hpp"
#include "hyperdiffuse/analysis.hpp"
#include "hyperdiffuse/errors.hpp"
#include "oracles.hpp"

using namespace hyperdiffuse;

TEST_CASE("c_alpha_beta_l") {
    CHECK(c_alpha_beta_l(1.0, 1.0, 7, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c_alpha_beta_l(0.3, 0.0, 9, 4.0) == 1.0);
    CHECK(c_alpha_beta_l(0.5, 0.8, 2, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("stability constants") {
    TheoryConstants c;
    c.c_x = 1.0;
    c.c_theta = 1.0;
    c.alpha = 1.0;
    c.beta = 1.0;
    c.diffusion_steps = 1;
    c.d_t = 1.0;  // C_{alpha,beta,L} = 1
    c.eta = 0.1;
    c.m = 10;
    c.t_steps = 1;

    const StabilityReport r = stability_constants(c);
    CHECK(r.c_alpha_beta_l == doctest::Approx(1.0));
    CHECK(r.l_m == doctest::Approx(1.0));
    CHECK(r.g_m == doctest::Approx(2.0));
    CHECK(r.s_m == doctest::Approx(3.0));
    CHECK(r.l_m_kappa == doctest::Approx(c.kappa * 1.0));

    SUBCASE("zero features zero the constants") {
        c.c_x = 0.0;
        const StabilityReport z = stability_constants(c);
        CHECK(z.l_m == 0.0);
        CHECK(z.g_m == 0.0);
        CHECK(z.s_m == 0.0);
    }
    SUBCASE("L_M and G_M are linear in C_x") {
        c.c_x = 2.0;
        const StabilityReport d = stability_constants(c);
        CHECK(d.l_m == doctest::Approx(2.0 * r.l_m));
        CHECK(d.g_m == doctest::Approx(2.0 * r.g_m));
    }
}

TEST_CASE("mu_shkc") {
    CHECK(mu_shkc(1.0, 1.0, 1.0, 0.1, 10, 1) == doctest::Approx(2.0 * 0.1 / 10.0));
    CHECK(mu_shkc(5.0, 3.0, 2.0, 0.0, 4, 100) == 0.0);
    CHECK(mu_shkc(1.0, 1.0, 1.0, 0.1, 10, 2) == doctest::Approx(0.042).epsilon(1e-15));

    bool overflow = false;
    const double mu = mu_shkc(1e300, 1e300, 1e300, 1.0, 1, 50, &overflow);
    CHECK(overflow);
    CHECK(std::isinf(mu));
}

TEST_CASE("K(m,n)") {
    CHECK(k_mn(1, 1) == 0.25);
    CHECK(k_mn(2, 1) == doctest::Approx(0.25 + 1.0 / 9.0).epsilon(1e-15));

    // elementary monotone-term bounds: m n^2/(n+m)^2 <= K <= m n^2/(n+1)^2
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const int m = gen::uniform_int(rng, 1, 200);
        const int n = gen::uniform_int(rng, 1, 200);
        const double k = k_mn(m, n);
        const double dm = m, dn = n;
        CHECK(k >= dm * dn * dn / ((dn + dm) * (dn + dm)) - 1e-12);
        CHECK(k <= dm * dn * dn / ((dn + 1) * (dn + 1)) + 1e-12);
        CHECK(k < dm);
    }
}

TEST_CASE("usb_gap") {
    const GapTerms g = usb_gap(0.0, 1.0, 10, 5, 0.1);
    CHECK(g.mu_kappa_term == 0.0);
    CHECK(g.total == doctest::Approx(g.concentration_term));
    CHECK(g.indicative);

    const GapTerms g2 = usb_gap(0.5, 2.0, 1, 1, 0.5);
    const double root = std::sqrt(2.0 * 0.25 * std::log(2.0));
    CHECK(g2.k_mn == 0.25);
    CHECK(g2.mu_kappa_term == doctest::Approx(0.5 * 2.0 * (1.0 + 2.0 * root)));
    CHECK(g2.concentration_term == doctest::Approx(2.0 * root));
    CHECK_THROWS_AS(usb_gap(0.0, 1.0, 1, 1, 1.5), ShapeMismatch);
}

TEST_CASE("property: mu is monotone in each driver") {
    std::mt19937_64 rng(900);
    for (int trial = 0; trial < 40; ++trial) {
        TheoryConstants c;
        c.c_x = gen::uniform(rng, 0.1, 2.0);
        c.c_theta = gen::uniform(rng, 0.1, 2.0);
        c.d_t = gen::uniform(rng, 1.0, 2.0);
        c.eta = gen::uniform(rng, 0.001, 0.2);
        c.m = gen::uniform_int(rng, 1, 50);
        c.t_steps = gen::uniform_int(rng, 1, 30);
        c.alpha = gen::uniform(rng, 0.3, 1.0);
        c.beta = gen::uniform(rng, 0.0, 1.0);
        c.diffusion_steps = gen::uniform_int(rng, 1, 6);

        auto mu_of = [](const TheoryConstants& tc) { return stability_constants(tc).mu; };
        const double base = mu_of(c);

        TheoryConstants bump = c;
        bump.eta *= 1.5;
        CHECK(mu_of(bump) >= base - 1e-15);
        bump = c;
        bump.t_steps += 5;
        CHECK(mu_of(bump) >= base - 1e-15);
        bump = c;
        bump.c_x *= 1.5;
        CHECK(mu_of(bump) >= base - 1e-15);
        bump = c;
        bump.c_theta *= 1.5;
        CHECK(mu_of(bump) >= base - 1e-15);
        bump = c;  // alpha drives mu through C_{alpha,beta,L} when d_T >= 1
        bump.alpha = std::min(1.0, bump.alpha * 1.2);
        CHECK(mu_of(bump) >= base - 1e-15);
    }
}

namespace {

struct LemmaFixture {
    Hypergraph h;
    Matrix x;
    std::vector<int> labels;
    std::vector<int> mask;
};

LemmaFixture make_lemma_fixture(std::mt19937_64& rng, int max_n = 20) {
    LemmaFixture f;
    f.h = gen::random_hypergraph(rng, max_n, 25);
    const int n = f.h.num_vertices;
    f.x = gen::random_matrix(rng, n, gen::uniform_int(rng, 1, 5));
    f.labels.resize(n);
    for (int v = 0; v < n; ++v) f.labels[v] = gen::uniform_int(rng, 0, 2);
    for (int v = 0; v < n; ++v)
        if (v == 0 || rng() % 3 == 0) f.mask.push_back(v);
    return f;
}

}  // namespace

TEST_CASE("lemma bounds: zero parameters give zero empirical values") {
    std::mt19937_64 rng(41);
    const LemmaFixture f = make_lemma_fixture(rng);
    const RhoFunction rho{0.0};
    const DiffusionOperator op(build_transition(f.h, rho, true), {0.9, 0.9, 3});

    ShkcModel zero = init_params(0, static_cast<int>(f.x.cols()), 4, 3);
    zero.theta.setZero();
    ShkcModel alt = zero;

    const LemmaReport r = verify_lemma_bounds(f.h, rho, op, f.x, zero, alt, f.labels, f.mask);
    CHECK(r.hidden_norm.empirical == 0.0);
    CHECK(r.hidden_perturbation.empirical == 0.0);  // identical parameter sets
    CHECK(r.violations() == 0);
    CHECK_NOTHROW(r.assert_ok());
}

TEST_CASE("property: lemma bounds hold across random runs") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 20; ++trial) {
        const LemmaFixture f = make_lemma_fixture(rng);
        const RhoFunction rho{trial % 2 == 0 ? 0.0 : -0.5};
        const DiffusionOperator op(
            build_transition(f.h, rho, true),
            {gen::uniform(rng, 0.5, 1.0), gen::uniform(rng, 0.0, 1.0), gen::uniform_int(rng, 1, 6)});
        const int d = static_cast<int>(f.x.cols());
        const ShkcModel model = init_params(trial, d, gen::uniform_int(rng, 1, 6), 3);
        const ShkcModel alt = init_params(trial + 1000, d, model.hidden_dim(), 3);

        const LemmaReport r =
            verify_lemma_bounds(f.h, rho, op, f.x, model, alt, f.labels, f.mask);
        CHECK(r.violations() == 0);
        CHECK(r.transition_l1.empirical <= r.d_t + 1e-12);
    }
}

TEST_CASE("assert_ok throws on a doctored report") {
    LemmaReport r;
    r.hidden_norm = {2.0, 1.0};
    CHECK(r.violations() == 1);
    CHECK_THROWS_AS(r.assert_ok(), BoundViolation);
}

TEST_CASE("head_lipschitz") {
    CHECK(head_lipschitz(1) == 1.0);
    CHECK(head_lipschitz(2) == doctest::Approx(std::sqrt(2.0)));
    CHECK(head_lipschitz(7) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("spectral coefficients: K = 1 hand case") {
    for (double alpha : {0.3, 0.7, 1.0}) {
        const std::vector<double> xi = spectral_coefficients(alpha, 1);
        REQUIRE(xi.size() == 2);
        CHECK(xi[0] == doctest::Approx(1.0 + alpha).epsilon(1e-15));
        CHECK(xi[1] == doctest::Approx(-alpha).epsilon(1e-15));
    }
}

TEST_CASE("spectral coefficients: alpha = 0 degenerates to the constant filter") {
    const std::vector<double> xi = spectral_coefficients(0.0, 3);
    CHECK(xi[0] == doctest::Approx(1.0 / 3.0));
    for (size_t i = 1; i < xi.size(); ++i) CHECK(xi[i] == 0.0);
}

TEST_CASE("spectral coefficients: K bounds") {
    CHECK_THROWS_AS(spectral_coefficients(0.5, 0), KTooLarge);
    CHECK_THROWS_AS(spectral_coefficients(0.5, 61), KTooLarge);
    CHECK_NOTHROW(spectral_coefficients(0.5, 60));
}

TEST_CASE("property: polynomial filter identity on random symmetric matrices") {
    std::mt19937_64 rng(1001);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = gen::uniform_int(rng, 2, 8);
        Matrix t = gen::random_matrix(rng, n, n);
        t = 0.5 * (t + t.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix> eig(t, Eigen::EigenvaluesOnly);
        const double radius = eig.eigenvalues().cwiseAbs().maxCoeff();
        if (radius > 0.0) t /= radius;  // spectral radius <= 1

        const int big_k = gen::uniform_int(rng, 1, 10);
        const double alpha = gen::uniform(rng, 0.0, 1.0);
        const std::vector<double> xi = spectral_coefficients(alpha, big_k);

        const Matrix laplacian = Matrix::Identity(n, n) - t;
        Matrix lhs = Matrix::Zero(n, n);
        Matrix lap_power = Matrix::Identity(n, n);
        for (int i = 0; i <= big_k; ++i) {
            lhs += xi[i] * lap_power;
            lap_power = lap_power * laplacian;
        }
        Matrix rhs = Matrix::Zero(n, n);
        Matrix t_power = Matrix::Identity(n, n);
        double theta = 1.0 / static_cast<double>(big_k);  // alpha^0 / K
        for (int k = 0; k <= big_k; ++k) {
            rhs += theta * t_power;
            t_power = t_power * t;
            theta *= alpha;
        }
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("spectrum histogram") {
    SUBCASE("beta = 0 has all eigenvalues at one") {
        const DiffusionOperator op(build_transition(gen::make_h3(), RhoFunction{0.0}, true),
                                   {0.8, 0.0, 4});
        const std::vector<int> counts = spectrum_histogram(op, {0.9, 1.1});
        CHECK(counts[0] == 3);
        CHECK(counts[1] == 0);
    }
    SUBCASE("count at threshold -inf is N") {
        const DiffusionOperator op(build_transition(gen::make_h3(), RhoFunction{0.0}, true),
                                   {0.9, 0.7, 2});
        const std::vector<int> counts =
            spectrum_histogram(op, {-std::numeric_limits<double>::infinity()});
        CHECK(counts[0] == 3);
    }
    SUBCASE("single step at alpha = beta = 1 counts the transition eigenvalues") {
        const TransitionMatrix t = build_transition(gen::make_h3(), RhoFunction{0.0}, true);
        const Matrix dense = Matrix(t.matrix);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(dense, Eigen::EigenvaluesOnly);

        const DiffusionOperator op(t, {1.0, 1.0, 1});
        std::vector<double> thresholds;
        for (int j = 0; j <= 10; ++j) thresholds.push_back(0.1 * j);
        const std::vector<int> counts = spectrum_histogram(op, thresholds);
        for (size_t i = 0; i < thresholds.size(); ++i) {
            int expected = 0;
            for (Eigen::Index e = 0; e < eig.eigenvalues().size(); ++e)
                if (eig.eigenvalues()(e) >= thresholds[i]) ++expected;
            CHECK(counts[i] == expected);
        }
    }
    SUBCASE("size cap") {
        const DiffusionOperator op(build_transition(gen::make_h3(), RhoFunction{0.0}, true),
                                   {1.0, 1.0, 1});
        CHECK_THROWS_AS(spectrum_histogram(op, {0.0}, 2), SizeCapExceeded);
    }
}
