#include "hyperdiffuse/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hyperdiffuse/errors.hpp"
#include "hyperdiffuse/io.hpp"
#include "hyperdiffuse/log.hpp"

namespace hyperdiffuse {

namespace {

// Uniform double in [0,1) from the top 53 bits, so streams are identical
// across standard library implementations.
double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void fill_glorot(Matrix& w, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            w(i, j) = (2.0 * next_uniform(rng) - 1.0) * limit;
}

}  // namespace

ShkcModel init_params(std::uint64_t seed, int d, int hidden, int num_classes) {
    if (d < 1 || hidden < 1 || num_classes < 1)
        throw ShapeMismatch("init_params dimensions must be positive (d=" + std::to_string(d) +
                            ", M=" + std::to_string(hidden) + ", C=" +
                            std::to_string(num_classes) + ")");
    std::mt19937_64 rng(seed);
    ShkcModel model;
    model.theta.resize(d, hidden);
    fill_glorot(model.theta, rng);
    model.classifier.resize(hidden, num_classes);
    fill_glorot(model.classifier, rng);
    model.bias = Vector::Zero(num_classes);
    return model;
}

ForwardResult forward(const ShkcModel& model, const Matrix& S) {
    if (S.cols() != model.theta.rows())
        throw ShapeMismatch("S has " + std::to_string(S.cols()) + " columns, Theta has " +
                            std::to_string(model.theta.rows()) + " rows");
    ForwardResult out;
    out.hidden = (S * model.theta).cwiseMax(0.0);
    Matrix logits = (out.hidden * model.classifier).rowwise() + model.bias.transpose();

    const int c = model.num_classes();
    if (c == 1) {
        out.probs = (1.0 + (-logits.array()).exp()).inverse();
    } else {
        // row-wise softmax, max-shifted
        out.probs.resize(logits.rows(), c);
        for (Eigen::Index i = 0; i < logits.rows(); ++i) {
            Eigen::RowVectorXd row = logits.row(i);
            row.array() -= row.maxCoeff();
            Eigen::RowVectorXd ex = row.array().exp();
            out.probs.row(i) = ex / ex.sum();
        }
    }
    return out;
}

Gradients loss_and_grads(const ShkcModel& model, const Matrix& S, const std::vector<int>& labels,
                         const std::vector<int>& mask, double weight_decay) {
    if (mask.empty()) throw EmptyMask("loss_and_grads needs at least one masked vertex");
    const int c = model.num_classes();
    for (int v : mask) {
        if (v < 0 || v >= static_cast<int>(S.rows()) || v >= static_cast<int>(labels.size()))
            throw IndexOutOfRange("mask vertex " + std::to_string(v) + " out of range");
        const int y = labels[v];
        const int limit = c == 1 ? 2 : c;
        if (y < 0 || y >= limit)
            throw IndexOutOfRange("label " + std::to_string(y) + " invalid for vertex " +
                                  std::to_string(v));
    }

    Matrix z1 = S * model.theta;
    Matrix hidden = z1.cwiseMax(0.0);
    Matrix logits = (hidden * model.classifier).rowwise() + model.bias.transpose();
    const double inv_m = 1.0 / static_cast<double>(mask.size());

    Gradients g;
    Matrix dlogits = Matrix::Zero(logits.rows(), c);

    if (c == 1) {
        for (int v : mask) {
            const double z = logits(v, 0);
            const double y = static_cast<double>(labels[v]);
            // log(1+exp(-|z|)) form avoids overflow on both tails
            const double softplus = std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0);
            g.loss += inv_m * (softplus - y * z);
            const double p = 1.0 / (1.0 + std::exp(-z));
            dlogits(v, 0) = inv_m * (p - y);
        }
    } else {
        for (int v : mask) {
            Eigen::RowVectorXd row = logits.row(v);
            const double zmax = row.maxCoeff();
            row.array() -= zmax;
            Eigen::RowVectorXd ex = row.array().exp();
            const double denom = ex.sum();
            g.loss += inv_m * (std::log(denom) - row(labels[v]));
            dlogits.row(v) = inv_m * (ex / denom);
            dlogits(v, labels[v]) -= inv_m;
        }
    }

    g.bias = dlogits.colwise().sum();
    g.classifier = hidden.transpose() * dlogits;
    Matrix dhidden = dlogits * model.classifier.transpose();
    // rectifier subgradient: 0 at 0
    Matrix dz1 = (z1.array() > 0.0).cast<double>() * dhidden.array();
    g.theta = S.transpose() * dz1;

    if (weight_decay != 0.0) {
        g.loss += 0.5 * weight_decay *
                  (model.theta.squaredNorm() + model.classifier.squaredNorm());
        g.theta += weight_decay * model.theta;
        g.classifier += weight_decay * model.classifier;
    }
    return g;
}

std::vector<int> predict(const Matrix& probs) {
    std::vector<int> out(probs.rows());
    if (probs.cols() == 1) {
        for (Eigen::Index i = 0; i < probs.rows(); ++i) out[i] = probs(i, 0) >= 0.5 ? 1 : 0;
    } else {
        for (Eigen::Index i = 0; i < probs.rows(); ++i) {
            Eigen::Index best;
            probs.row(i).maxCoeff(&best);
            out[i] = static_cast<int>(best);
        }
    }
    return out;
}

double accuracy(const Matrix& probs, const std::vector<int>& labels,
                const std::vector<int>& vertices) {
    if (vertices.empty()) return 0.0;
    const std::vector<int> pred = predict(probs);
    int hits = 0;
    for (int v : vertices)
        if (pred[v] == labels[v]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(vertices.size());
}

namespace {

struct AdamState {
    Matrix m_theta, v_theta, m_cls, v_cls;
    Vector m_bias, v_bias;
    long step = 0;

    explicit AdamState(const ShkcModel& model)
        : m_theta(Matrix::Zero(model.theta.rows(), model.theta.cols())),
          v_theta(m_theta),
          m_cls(Matrix::Zero(model.classifier.rows(), model.classifier.cols())),
          v_cls(m_cls),
          m_bias(Vector::Zero(model.bias.size())),
          v_bias(m_bias) {}
};

template <typename T>
void adam_update(T& param, const T& grad, T& m, T& v, const TrainConfig& cfg, double bc1,
                 double bc2) {
    m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad;
    v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * grad.cwiseProduct(grad);
    param.array() -=
        cfg.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg.adam_eps);
}

}  // namespace

TrainResult train_on_features(const Matrix& S, const std::vector<int>& labels,
                              const std::vector<int>& train_split, const TrainConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    if (train_split.empty()) throw EmptyMask("train split is empty");
    if (cfg.patience > cfg.epochs)
        throw ShapeMismatch("patience must not exceed epochs");
    if (!(cfg.learning_rate > 0.0)) throw ShapeMismatch("learning rate must be positive");

    const int n = static_cast<int>(S.rows());
    for (int v : train_split) {
        if (v < 0 || v >= n) throw IndexOutOfRange("train vertex out of range");
        if (labels[v] == kUnlabeled)
            throw IndexOutOfRange("train vertex " + std::to_string(v) + " is unlabeled");
    }
    if (static_cast<int>(labels.size()) != n)
        throw ShapeMismatch("label vector length does not match feature rows");
    const int observed_classes = count_classes(labels);
    const int c = std::max(observed_classes, 2);  // softmax head

    std::vector<char> class_seen(c, 0);
    for (int v : train_split) class_seen[labels[v]] = 1;
    for (int k = 0; k < observed_classes; ++k)
        if (!class_seen[k])
            throw EmptyMask("class " + std::to_string(k) +
                            " has no labeled vertex in the train split");

    // Seeded 20% of the train split held out for early stopping.
    std::vector<int> shuffled = train_split;
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    for (size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[rng() % i]);
    size_t n_val = shuffled.size() >= 5 ? shuffled.size() / 5 : (shuffled.size() >= 2 ? 1 : 0);
    std::vector<int> val_set(shuffled.begin(), shuffled.begin() + n_val);
    std::vector<int> fit_set(shuffled.begin() + n_val, shuffled.end());
    if (fit_set.empty()) std::swap(fit_set, val_set);
    const bool has_val = !val_set.empty();

    std::vector<int> test_set;
    std::vector<char> in_train(n, 0);
    for (int v : train_split) in_train[v] = 1;
    for (int v = 0; v < n; ++v)
        if (!in_train[v] && labels[v] != kUnlabeled) test_set.push_back(v);

    ShkcModel model = init_params(cfg.seed, static_cast<int>(S.cols()), cfg.hidden_dim, c);
    AdamState adam(model);

    TrainResult result;
    result.best_model = model;
    double best_monitor = std::numeric_limits<double>::infinity();
    int since_best = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Gradients g = loss_and_grads(model, S, labels, fit_set, cfg.weight_decay);
        if (!std::isfinite(g.loss))
            throw NumericalError("non-finite training loss at epoch " + std::to_string(epoch));

        if (cfg.optimizer == Optimizer::adam) {
            ++adam.step;
            const double bc1 = 1.0 - std::pow(cfg.adam_beta1, adam.step);
            const double bc2 = 1.0 - std::pow(cfg.adam_beta2, adam.step);
            adam_update(model.theta, g.theta, adam.m_theta, adam.v_theta, cfg, bc1, bc2);
            adam_update(model.classifier, g.classifier, adam.m_cls, adam.v_cls, cfg, bc1, bc2);
            adam_update(model.bias, g.bias, adam.m_bias, adam.v_bias, cfg, bc1, bc2);
        } else {
            model.theta -= cfg.learning_rate * g.theta;
            model.classifier -= cfg.learning_rate * g.classifier;
            model.bias -= cfg.learning_rate * g.bias;
        }

        ForwardResult fwd = forward(model, S);
        EpochStats stats;
        stats.train_loss = g.loss;
        stats.train_accuracy = accuracy(fwd.probs, labels, fit_set);
        if (has_val) {
            stats.val_loss = loss_and_grads(model, S, labels, val_set, 0.0).loss;
            stats.val_accuracy = accuracy(fwd.probs, labels, val_set);
        } else {
            stats.val_loss = loss_and_grads(model, S, labels, fit_set, 0.0).loss;
            stats.val_accuracy = stats.train_accuracy;
        }
        result.history.push_back(stats);

        if (stats.val_loss < best_monitor) {
            best_monitor = stats.val_loss;
            result.best_model = model;
            result.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }

    ForwardResult best_fwd = forward(result.best_model, S);
    result.test_accuracy = accuracy(best_fwd.probs, labels, test_set);
    result.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

TrainResult train(const Hypergraph& h, const Matrix& X, const std::vector<int>& labels,
                  const std::vector<int>& train_split, const TrainConfig& cfg) {
    check_features(X, h.num_vertices);
    if (static_cast<int>(labels.size()) != h.num_vertices)
        throw ShapeMismatch("label vector length does not match vertex count");
    TransitionMatrix t = build_transition(h, RhoFunction{cfg.sigma}, true);
    DiffusionOperator op(std::move(t), cfg.diffusion);
    Matrix S = op.apply(X);  // computed once; Theta never touches T~
    return train_on_features(S, labels, train_split, cfg);
}

void save_checkpoint(const ShkcModel& model, const std::string& path, std::uint64_t seed,
                     const std::string& config_hash) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open checkpoint for writing: " + path);
    nlohmann::json header;
    header["d"] = model.input_dim();
    header["hidden"] = model.hidden_dim();
    header["classes"] = model.num_classes();
    header["seed"] = seed;
    header["config_hash"] = config_hash;
    os << header.dump() << "\n";
    write_matrix_csv(model.theta, os);
    write_matrix_csv(model.classifier, os);
    write_matrix_csv(model.bias.transpose(), os);
}

ShkcModel load_checkpoint(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open checkpoint: " + path);
    std::string header_line;
    if (!std::getline(is, header_line)) throw DataError("checkpoint missing header: " + path);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("checkpoint header is not JSON: " + std::string(e.what()));
    }
    const int d = header.at("d").get<int>();
    const int hidden = header.at("hidden").get<int>();
    const int classes = header.at("classes").get<int>();
    if (d < 1 || hidden < 1 || classes < 1) throw DataError("checkpoint shapes invalid");

    auto read_row = [&](Eigen::Index cols) {
        std::string line;
        if (!std::getline(is, line)) throw DataError("checkpoint truncated: " + path);
        std::stringstream ls(line);
        Eigen::RowVectorXd row(cols);
        std::string cell;
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (!std::getline(ls, cell, ',')) throw DataError("checkpoint row too short");
            row(j) = std::stod(cell);
        }
        return row;
    };

    ShkcModel model;
    model.theta.resize(d, hidden);
    for (int i = 0; i < d; ++i) model.theta.row(i) = read_row(hidden);
    model.classifier.resize(hidden, classes);
    for (int i = 0; i < hidden; ++i) model.classifier.row(i) = read_row(classes);
    model.bias = read_row(classes).transpose();
    return model;
}

}  // namespace hyperdiffuse
