#pragma once

#include <cstdint>
#include <vector>

#include "hyperdiffuse/diffusion.hpp"

namespace hyperdiffuse {

/// One-layer hypergraph kernel convolution plus a linear classifier head.
/// C == 1 is the binary case (single sigmoid output, labels in {0,1});
/// C >= 2 uses a row-wise softmax.
struct ShkcModel {
    Matrix theta;       // d x M channel-mixing weights
    Matrix classifier;  // M x C
    Vector bias;        // C

    int input_dim() const { return static_cast<int>(theta.rows()); }
    int hidden_dim() const { return static_cast<int>(theta.cols()); }
    int num_classes() const { return static_cast<int>(classifier.cols()); }
};

enum class Optimizer { adam, sgd };

struct TrainConfig {
    double learning_rate = 0.01;
    double weight_decay = 0.0;
    int hidden_dim = 128;
    int epochs = 1000;
    int patience = 100;
    std::uint64_t seed = 0;
    DiffusionParams diffusion;
    double sigma = 0.0;  // rho exponent for the transition matrix
    Optimizer optimizer = Optimizer::adam;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
};

struct EpochStats {
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
};

struct TrainResult {
    ShkcModel best_model;
    std::vector<EpochStats> history;
    int best_epoch = -1;
    double test_accuracy = 0.0;
    double wall_time_sec = 0.0;
};

struct ForwardResult {
    Matrix hidden;  // H = relu(S Theta), N x M
    Matrix probs;   // softmax rows (sigmoid column for C == 1), N x C
};

struct Gradients {
    double loss = 0.0;
    Matrix theta;
    Matrix classifier;
    Vector bias;
};

/// Glorot-uniform Theta and classifier, zero bias, reproducible per seed.
ShkcModel init_params(std::uint64_t seed, int d, int hidden, int num_classes);

/// H = relu(S Theta); probabilities from the classifier head.
ForwardResult forward(const ShkcModel& model, const Matrix& S);

/// Mean cross-entropy over the masked vertices plus
/// 0.5 * weight_decay * (||Theta||_F^2 + ||classifier||_F^2), with analytic
/// gradients (rectifier subgradient 0 at 0).
Gradients loss_and_grads(const ShkcModel& model, const Matrix& S, const std::vector<int>& labels,
                         const std::vector<int>& mask, double weight_decay = 0.0);

/// Predicted class ids, one per row of probs.
std::vector<int> predict(const Matrix& probs);

/// Fraction of the given vertices whose prediction matches the label.
double accuracy(const Matrix& probs, const std::vector<int>& labels,
                const std::vector<int>& vertices);

/// Full-batch training with early stopping: the diffused features are
/// precomputed once, a seeded 20% of the train split is held out for
/// validation, and the best snapshot (by monitored loss) is restored after
/// `patience` non-improving epochs. Test vertices are all labeled vertices
/// outside the train split.
TrainResult train(const Hypergraph& h, const Matrix& X, const std::vector<int>& labels,
                  const std::vector<int>& train_split, const TrainConfig& cfg);

/// Same training loop on precomputed diffused features.
TrainResult train_on_features(const Matrix& S, const std::vector<int>& labels,
                              const std::vector<int>& train_split, const TrainConfig& cfg);

/// Checkpoint file: one JSON header line (shapes, seed, config hash)
/// followed by CSV rows of Theta, classifier and bias.
void save_checkpoint(const ShkcModel& model, const std::string& path, std::uint64_t seed,
                     const std::string& config_hash);
ShkcModel load_checkpoint(const std::string& path);

}  // namespace hyperdiffuse
