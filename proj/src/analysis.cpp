#include "hyperdiffuse/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "hyperdiffuse/errors.hpp"

namespace hyperdiffuse {

double c_alpha_beta_l(double alpha, double beta, int diffusion_steps, double d_t) {
    if (diffusion_steps < 1) throw ShapeMismatch("diffusion_steps must be >= 1");
    double sum = 0.0;
    double pow_term = 1.0;
    for (int l = 1; l <= diffusion_steps; ++l) {
        pow_term *= alpha * d_t;
        sum += pow_term;
    }
    return beta / static_cast<double>(diffusion_steps) * sum + (1.0 - beta);
}

StabilityReport stability_constants(const TheoryConstants& c) {
    StabilityReport r;
    r.d_t = c.d_t;
    r.kappa = c.kappa;
    r.c_alpha_beta_l = c_alpha_beta_l(c.alpha, c.beta, c.diffusion_steps, c.d_t);

    const double cx = c.c_x;
    const double cabl = r.c_alpha_beta_l;
    const double max_theta = std::max(1.0, c.c_theta);
    r.l_m = cx * cabl * max_theta;
    r.g_m = cx * cabl * (1.0 + c.c_theta);
    r.s_m = cx * cx * cabl * cabl * max_theta * max_theta + cx * cx * cabl * cabl * c.c_theta +
            cx * cabl;
    r.l_m_kappa = c.kappa * r.l_m;
    r.g_m_kappa = c.kappa * r.g_m;
    r.s_m_kappa = c.kappa * r.s_m;

    r.mu = mu_shkc(r.l_m, r.g_m, r.s_m, c.eta, c.m, c.t_steps, &r.mu_overflow);
    r.gap = usb_gap(r.mu, c.kappa, c.m, c.n, c.delta);
    r.h_max_bound = cabl * c.c_x * c.c_theta;
    return r;
}

double mu_shkc(double l_m, double g_m, double s_m, double eta, int m, int t_steps,
               bool* overflow) {
    if (m < 1 || t_steps < 1) throw ShapeMismatch("mu_shkc needs m >= 1 and T >= 1");
    if (overflow != nullptr) *overflow = false;
    double sum = 0.0;
    double term = 1.0;  // (1 + eta S)^{t-1}
    for (int t = 1; t <= t_steps; ++t) {
        sum += term;
        term *= 1.0 + eta * s_m;
        if (!std::isfinite(sum) || !std::isfinite(term)) break;
    }
    const double mu = 2.0 * eta * l_m * g_m / static_cast<double>(m) * sum;
    if (!std::isfinite(mu)) {
        if (overflow != nullptr) *overflow = true;
        return std::numeric_limits<double>::infinity();
    }
    return mu;
}

double k_mn(int m, int n) {
    if (m < 1 || n < 1) throw ShapeMismatch("K(m,n) needs m,n >= 1");
    double sum = 0.0;
    const double dn = static_cast<double>(n);
    for (int i = 1; i <= m; ++i) {
        const double denom = dn + static_cast<double>(i);
        sum += dn * dn / (denom * denom);
    }
    return sum;
}

GapTerms usb_gap(double mu, double kappa, int m, int n, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ShapeMismatch("delta must be in (0,1)");
    GapTerms g;
    g.k_mn = k_mn(m, n);
    const double root = std::sqrt(2.0 * g.k_mn * std::log(1.0 / delta));
    g.mu_kappa_term = mu * kappa * (1.0 + 2.0 * root);
    g.concentration_term =
        (static_cast<double>(m) + static_cast<double>(n)) /
        (static_cast<double>(m) * static_cast<double>(n)) * root;
    g.total = g.mu_kappa_term + g.concentration_term;
    g.indicative = true;
    return g;
}

double head_lipschitz(int num_classes) {
    return num_classes <= 1 ? 1.0 : std::sqrt(2.0);
}

int LemmaReport::violations() const {
    int count = 0;
    for (const LemmaCheck* check : {&hidden_norm, &hidden_perturbation, &grad_theta,
                                    &grad_classifier, &transition_l1})
        if (!check->ok()) ++count;
    return count;
}

void LemmaReport::assert_ok() const {
    const int v = violations();
    if (v > 0)
        throw BoundViolation("lemma verification failed " + std::to_string(v) +
                             " check(s); the bounds are theorems, so this indicates an "
                             "implementation bug");
}

namespace {

double max_row_norm(const Matrix& m) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) best = std::max(best, m.row(i).norm());
    return best;
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.jacobiSvd().singularValues()(0);
}

// Per-vertex loss gradients: dLoss_i/dTheta and dLoss_i/dW for one masked
// vertex, Frobenius norms maximized over the mask.
struct PerVertexGradNorms {
    double grad_theta = 0.0;
    double grad_classifier = 0.0;
};

PerVertexGradNorms per_vertex_grad_norms(const ShkcModel& model, const Matrix& S,
                                         const std::vector<int>& labels,
                                         const std::vector<int>& mask) {
    PerVertexGradNorms out;
    for (int v : mask) {
        Gradients g = loss_and_grads(model, S, labels, std::vector<int>{v}, 0.0);
        out.grad_theta = std::max(out.grad_theta, g.theta.norm());
        out.grad_classifier = std::max(out.grad_classifier, g.classifier.norm());
    }
    return out;
}

}  // namespace

LemmaReport verify_lemma_bounds(const Hypergraph& h, const RhoFunction& rho,
                                const DiffusionOperator& op, const Matrix& X,
                                const ShkcModel& model, const ShkcModel& model_alt,
                                const std::vector<int>& labels, const std::vector<int>& mask) {
    if (model.theta.rows() != model_alt.theta.rows() ||
        model.theta.cols() != model_alt.theta.cols())
        throw ShapeMismatch("model and model_alt disagree on Theta shape");

    LemmaReport r;
    r.c_x = max_row_norm(X);
    r.c_theta = spectral_norm(model.theta);
    r.c_omega = spectral_norm(model.classifier);
    r.kappa = head_lipschitz(model.num_classes());
    r.d_t = prop1_bound(h, rho);
    r.c_alpha_beta_l =
        c_alpha_beta_l(op.params().alpha, op.params().beta, op.params().steps, r.d_t);

    const Matrix S = op.apply(X);
    const Matrix hidden = (S * model.theta).cwiseMax(0.0);
    const Matrix hidden_alt = (S * model_alt.theta).cwiseMax(0.0);

    r.hidden_norm = {max_row_norm(hidden), r.c_alpha_beta_l * r.c_x * r.c_theta};
    r.hidden_perturbation = {max_row_norm(hidden - hidden_alt),
                             r.c_alpha_beta_l * r.c_x *
                                 spectral_norm(model.theta - model_alt.theta)};

    // Gradient bounds use the measured classifier norm in place of the
    // theory's ||omega|| <= 1 assumption.
    const PerVertexGradNorms grads = per_vertex_grad_norms(model, S, labels, mask);
    r.grad_theta = {grads.grad_theta, r.kappa * r.c_x * r.c_alpha_beta_l * r.c_omega};
    r.grad_classifier = {grads.grad_classifier,
                         r.kappa * r.c_x * r.c_alpha_beta_l * r.c_theta};

    r.transition_l1 = {l1_norm(op.transition()), r.d_t};
    return r;
}

namespace {

// Pascal-triangle binomials, exact in unsigned 64-bit up to K = 60.
std::vector<std::vector<std::uint64_t>> binomial_table(int K) {
    std::vector<std::vector<std::uint64_t>> c(K + 1);
    for (int k = 0; k <= K; ++k) {
        c[k].assign(k + 1, 1);
        for (int i = 1; i < k; ++i) c[k][i] = c[k - 1][i - 1] + c[k - 1][i];
    }
    return c;
}

}  // namespace

std::vector<double> spectral_coefficients(double alpha, int K) {
    if (K < 1) throw KTooLarge("K must be >= 1");
    if (K > 60) throw KTooLarge("K capped at 60 to keep binomials exact in 64-bit");
    const auto binom = binomial_table(K);

    std::vector<double> theta(K + 1);
    theta[0] = 1.0 / static_cast<double>(K);  // alpha^0 / K with 0^0 := 1
    for (int k = 1; k <= K; ++k) theta[k] = theta[k - 1] * alpha;

    std::vector<double> xi(K + 1, 0.0);
    for (int i = 0; i <= K; ++i) {
        double sum = 0.0;
        for (int k = i; k <= K; ++k) sum += static_cast<double>(binom[k][i]) * theta[k];
        xi[i] = (i % 2 == 0 ? 1.0 : -1.0) * sum;
    }
    return xi;
}

std::vector<int> spectrum_histogram(const DiffusionOperator& op,
                                    const std::vector<double>& thresholds, int dense_cap) {
    const Matrix a = op.dense(dense_cap);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
    const Vector eigenvalues = solver.eigenvalues();

    std::vector<int> counts(thresholds.size(), 0);
    for (size_t t = 0; t < thresholds.size(); ++t)
        for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
            if (eigenvalues[i] >= thresholds[t]) ++counts[t];
    return counts;
}

}  // namespace hyperdiffuse
