#pragma once

#include <vector>

#include "hyperdiffuse/model.hpp"

namespace hyperdiffuse {

/// Measured and configured constants feeding the stability bounds.
struct TheoryConstants {
    double c_x = 0.0;      // max feature row norm
    double c_theta = 0.0;  // spectral-norm bound on Theta
    double d_t = 1.0;      // l1-norm bound on the transition matrix
    double kappa = 1.0;    // Lipschitz constant of the loss head
    double eta = 0.0;      // learning rate
    int t_steps = 1;       // training steps T
    int m = 1;             // train size
    int n = 1;             // test size
    double alpha = 1.0;
    double beta = 1.0;
    int diffusion_steps = 1;  // L
    double delta = 0.1;       // gap confidence parameter
};

/// Generalization-gap terms with the unspecified big-O constants set to 1;
/// `indicative` flags that convention.
struct GapTerms {
    double k_mn = 0.0;
    double mu_kappa_term = 0.0;       // mu * kappa * (1 + 2 sqrt(2 K ln(1/delta)))
    double concentration_term = 0.0;  // (m+n)/(mn) * sqrt(2 K ln(1/delta))
    double total = 0.0;
    bool indicative = true;
};

struct StabilityReport {
    double c_alpha_beta_l = 0.0;
    double d_t = 1.0;
    double l_m = 0.0, g_m = 0.0, s_m = 0.0;  // kappa-free form
    double l_m_kappa = 0.0, g_m_kappa = 0.0, s_m_kappa = 0.0;
    double kappa = 1.0;
    double mu = 0.0;
    bool mu_overflow = false;
    GapTerms gap;
    double h_max_bound = 0.0;
    double empirical_h_max = 0.0;
    double empirical_l1 = 0.0;
};

/// One empirical-vs-bound comparison.
struct LemmaCheck {
    double empirical = 0.0;
    double bound = 0.0;
    bool ok() const { return empirical <= bound + 1e-8; }
};

/// Empirical verification of the hidden-representation and gradient bounds,
/// with every constant measured from the actual run.
struct LemmaReport {
    double c_x = 0.0;
    double c_theta = 0.0;
    double c_omega = 0.0;  // measured classifier norm (assumed <= 1 in the theory)
    double kappa = 1.0;
    double c_alpha_beta_l = 0.0;
    double d_t = 1.0;
    LemmaCheck hidden_norm;          // max row norm of H vs C_abl * C_x * C_Theta
    LemmaCheck hidden_perturbation;  // max row norm of H(Theta)-H(Theta~)
    LemmaCheck grad_theta;           // max per-vertex loss gradient wrt Theta
    LemmaCheck grad_classifier;      // max per-vertex loss gradient wrt classifier
    LemmaCheck transition_l1;        // l1 norm of T~ vs d_T

    int violations() const;
    /// Throws BoundViolation when any check fails; a failure indicates an
    /// implementation bug, the bounds are theorems.
    void assert_ok() const;
};

/// C_{alpha,beta,L} = (beta/L) * sum_{l=1..L} (alpha d_T)^l + (1-beta),
/// summed ascending.
double c_alpha_beta_l(double alpha, double beta, int diffusion_steps, double d_t);

/// Fills the Lipschitz / gradient / smoothness constants, mu and the gap
/// terms from the given constants. Kappa-scaled variants sit next to the
/// kappa-free ones.
StabilityReport stability_constants(const TheoryConstants& c);

/// mu = (2 eta L_M G_M / m) * sum_{t=1..T} (1 + eta S_M)^{t-1}. Sets
/// *overflow and returns +inf when the sum leaves the representable range.
double mu_shkc(double l_m, double g_m, double s_m, double eta, int m, int t_steps,
               bool* overflow = nullptr);

/// K(m,n) = sum_{i=1..m} n^2 / (n+i)^2.
double k_mn(int m, int n);

/// Gap bound with O-constants 1: mu*kappa*(1 + 2 sqrt(2 K ln(1/delta))) +
/// ((m+n)/(mn)) * sqrt(2 K ln(1/delta)).
GapTerms usb_gap(double mu, double kappa, int m, int n, double delta);

/// Lipschitz constant of the cross-entropy head with respect to the logits:
/// 1 for the sigmoid binary head, sqrt(2) for the softmax head.
double head_lipschitz(int num_classes);

/// Measures C_x, C_Theta and the classifier norm from the given run, checks
/// the hidden-norm, perturbation and gradient bounds plus the transition
/// l1 bound. model_alt supplies the second parameter set for the
/// perturbation check.
LemmaReport verify_lemma_bounds(const Hypergraph& h, const RhoFunction& rho,
                                const DiffusionOperator& op, const Matrix& X,
                                const ShkcModel& model, const ShkcModel& model_alt,
                                const std::vector<int>& labels, const std::vector<int>& mask);

/// Polynomial filter coefficients xi_i = (-1)^i sum_{k=i..K} C(k,i) alpha^k / K
/// satisfying sum_i xi_i (I-T)^i = sum_k (alpha^k/K) T^k. K capped at 60 so
/// the binomials stay exact in 64-bit integers.
std::vector<double> spectral_coefficients(double alpha, int K);

/// Counts of eigenvalues of the dense operator A(t) at or above each
/// threshold.
std::vector<int> spectrum_histogram(const DiffusionOperator& op,
                                    const std::vector<double>& thresholds,
                                    int dense_cap = kDefaultDenseCap);

}  // namespace hyperdiffuse
