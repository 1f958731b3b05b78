#include "hyperdiffuse/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "hyperdiffuse/errors.hpp"
#include "hyperdiffuse/log.hpp"

namespace hyperdiffuse {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kProvenance = "hyperdiffuse/0.1.0";

template <typename T>
std::vector<T> list_or_default(const json& j, const char* key, std::vector<T> fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
}

}  // namespace

json GridPoint::to_json() const {
    json j;
    j["alpha"] = alpha;
    j["beta"] = beta;
    j["steps"] = steps;
    j["sigma"] = sigma;
    j["learning_rate"] = learning_rate;
    j["weight_decay"] = weight_decay;
    j["hidden"] = hidden;
    return j;
}

std::vector<GridPoint> ExperimentConfig::grid() const {
    std::vector<GridPoint> points;
    for (double a : alphas)
        for (double b : betas)
            for (int t : steps)
                for (double s : sigmas)
                    for (double lr : learning_rates)
                        for (double wd : weight_decays)
                            for (int hd : hidden_dims)
                                points.push_back({a, b, t, s, lr, wd, hd});
    return points;
}

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig cfg;
    try {
        if (j.contains("dataset")) {
            const json& d = j.at("dataset");
            cfg.data.hypergraph = d.value("hypergraph", "");
            cfg.data.features = d.value("features", "");
            cfg.data.labels = d.value("labels", "");
            cfg.data.splits_dir = d.value("splits_dir", "");
        }
        const json diffusion = j.value("diffusion", json::object());
        cfg.alphas = list_or_default<double>(diffusion, "alpha",
                                             {1, 0.97, 0.95, 0.9, 0.85, 0.8, 0.75, 0.7, 0.65, 0.6});
        cfg.betas = list_or_default<double>(diffusion, "beta", {1, 0.95, 0.90, 0.85, 0.8});
        cfg.steps = list_or_default<int>(diffusion, diffusion.contains("t") ? "t" : "steps",
                                         {2, 4, 6, 8, 16, 32, 64});
        cfg.sigmas = list_or_default<double>(diffusion, "sigma", {-2, -1, -0.5, 0, 0.5, 1, 2});

        const json training = j.value("training", json::object());
        cfg.learning_rates =
            list_or_default<double>(training, "learning_rate", {0.001, 0.005, 0.01});
        cfg.weight_decays =
            list_or_default<double>(training, "weight_decay", {1e-3, 1e-4, 5e-4, 1e-5});
        cfg.hidden_dims = list_or_default<int>(training, "hidden", {128});
        cfg.epochs = training.value("epochs", 1000);
        cfg.patience = training.value("patience", 100);
        const std::string opt = training.value("optimizer", "adam");
        if (opt == "adam") {
            cfg.optimizer = Optimizer::adam;
        } else if (opt == "sgd") {
            cfg.optimizer = Optimizer::sgd;
        } else {
            throw ConfigError("unknown optimizer '" + opt + "'");
        }

        cfg.seeds = list_or_default<std::uint64_t>(j, "seeds", {0});
        cfg.out_dir = j.value("out_dir", ".");
        cfg.checkpoint = j.value("checkpoint", "");
        cfg.gap_delta = j.value("gap_delta", 0.1);
        cfg.threads = j.value("threads", 1);
        cfg.dense_cap = j.value("dense_cap", kDefaultDenseCap);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    if (cfg.alphas.empty() || cfg.betas.empty() || cfg.steps.empty() || cfg.sigmas.empty() ||
        cfg.learning_rates.empty() || cfg.weight_decays.empty() || cfg.hidden_dims.empty())
        throw ConfigError("grid lists must be non-empty");
    if (cfg.seeds.empty()) throw ConfigError("seeds must be non-empty");
    if (cfg.epochs < 1 || cfg.patience < 1 || cfg.patience > cfg.epochs)
        throw ConfigError("need 1 <= patience <= epochs");
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config: " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(j);
}

Dataset load_dataset(const DatasetPaths& paths) {
    Dataset ds;
    ds.hypergraph = read_hypergraph_file(paths.hypergraph);
    ds.features = read_features_file(paths.features);
    check_features(ds.features, ds.hypergraph.num_vertices);
    ds.labels = read_labels_file(paths.labels, ds.hypergraph.num_vertices);
    ds.splits = read_splits_dir(paths.splits_dir);
    for (const auto& split : ds.splits)
        for (int v : split) {
            if (v < 0 || v >= ds.hypergraph.num_vertices)
                throw DataError("split vertex " + std::to_string(v) + " out of range");
            if (ds.labels[v] == kUnlabeled)
                throw DataError("split vertex " + std::to_string(v) + " is unlabeled");
        }
    return ds;
}

std::string config_hash(const GridPoint& gp) {
    const std::string dump = gp.to_json().dump();
    std::uint64_t hash = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char ch : dump) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double stddev(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double mu = mean(xs);
    double sum = 0.0;
    for (double x : xs) sum += (x - mu) * (x - mu);
    return std::sqrt(sum / static_cast<double>(xs.size()));
}

json RunRecord::to_json() const {
    json j;
    j["config_hash"] = config_hash;
    j["config"] = config;
    j["split_accuracies"] = split_accuracies;
    j["mean_accuracy"] = mean_accuracy;
    j["std_accuracy"] = std_accuracy;
    j["wall_times_sec"] = wall_times_sec;
    j["seconds_per_epoch"] = seconds_per_epoch;
    j["provenance"] = provenance;
    return j;
}

RunRecord RunRecord::from_json(const json& j) {
    RunRecord r;
    try {
        r.config_hash = j.at("config_hash").get<std::string>();
        r.config = j.at("config");
        r.split_accuracies = j.at("split_accuracies").get<std::vector<double>>();
        r.mean_accuracy = j.at("mean_accuracy").get<double>();
        r.std_accuracy = j.at("std_accuracy").get<double>();
        r.wall_times_sec = j.value("wall_times_sec", std::vector<double>{});
        r.seconds_per_epoch = j.value("seconds_per_epoch", std::vector<double>{});
        r.provenance = j.value("provenance", "");
    } catch (const json::exception& e) {
        throw DataError("malformed run record: " + std::string(e.what()));
    }
    if (std::abs(mean(r.split_accuracies) - r.mean_accuracy) > 1e-12 ||
        std::abs(stddev(r.split_accuracies) - r.std_accuracy) > 1e-12)
        throw DataError("run record self-consistency check failed for " + r.config_hash);
    return r;
}

RunRecord load_run_record(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open run record: " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw DataError("run record is not valid JSON: " + std::string(e.what()));
    }
    return RunRecord::from_json(j);
}

namespace {

TrainConfig make_train_config(const ExperimentConfig& cfg, const GridPoint& gp,
                              std::uint64_t seed) {
    TrainConfig tc;
    tc.learning_rate = gp.learning_rate;
    tc.weight_decay = gp.weight_decay;
    tc.hidden_dim = gp.hidden;
    tc.epochs = cfg.epochs;
    tc.patience = cfg.patience;
    tc.seed = seed;
    tc.diffusion = {gp.alpha, gp.beta, gp.steps};
    tc.sigma = gp.sigma;
    tc.optimizer = cfg.optimizer;
    return tc;
}

void write_epoch_csv(const std::string& path, const std::vector<EpochStats>& history) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open epoch CSV for writing: " + path);
    os << "epoch,train_loss,train_accuracy,val_loss,val_accuracy\n";
    for (size_t e = 0; e < history.size(); ++e)
        os << e << "," << format_double(history[e].train_loss) << ","
           << format_double(history[e].train_accuracy) << ","
           << format_double(history[e].val_loss) << ","
           << format_double(history[e].val_accuracy) << "\n";
}

struct Job {
    size_t grid_index;
    size_t split_index;
};

// Runs jobs on up to `threads` workers. Results land in preallocated slots,
// so aggregation does not depend on completion order.
void run_jobs(int threads, size_t job_count, const std::function<void(size_t)>& body) {
    if (threads <= 1 || job_count <= 1) {
        for (size_t i = 0; i < job_count; ++i) body(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= job_count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(threads, static_cast<int>(job_count));
    pool.reserve(n);
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::vector<RunRecord> cmd_train(const ExperimentConfig& cfg) {
    const Dataset ds = load_dataset(cfg.data);
    fs::create_directories(cfg.out_dir);
    const std::vector<GridPoint> grid = cfg.grid();
    const size_t n_splits = ds.splits.size();

    std::vector<Job> jobs;
    for (size_t g = 0; g < grid.size(); ++g)
        for (size_t s = 0; s < n_splits; ++s) jobs.push_back({g, s});

    std::vector<std::vector<double>> accuracies(grid.size(), std::vector<double>(n_splits, 0.0));
    std::vector<std::vector<double>> times(grid.size(), std::vector<double>(n_splits, 0.0));
    std::vector<std::vector<double>> epoch_times(grid.size(), std::vector<double>(n_splits, 0.0));

    run_jobs(cfg.threads, jobs.size(), [&](size_t i) {
        const Job job = jobs[i];
        const GridPoint& gp = grid[job.grid_index];
        const std::uint64_t seed = cfg.seeds[job.split_index % cfg.seeds.size()];
        const TrainConfig tc = make_train_config(cfg, gp, seed);
        const TrainResult result =
            train(ds.hypergraph, ds.features, ds.labels, ds.splits[job.split_index], tc);
        accuracies[job.grid_index][job.split_index] = result.test_accuracy;
        times[job.grid_index][job.split_index] = result.wall_time_sec;
        epoch_times[job.grid_index][job.split_index] =
            result.wall_time_sec / static_cast<double>(std::max<size_t>(result.history.size(), 1));
        const std::string csv = cfg.out_dir + "/epochs_" + config_hash(gp) + "_split" +
                                std::to_string(job.split_index) + ".csv";
        write_epoch_csv(csv, result.history);
    });

    std::vector<RunRecord> records;
    records.reserve(grid.size());
    for (size_t g = 0; g < grid.size(); ++g) {
        RunRecord r;
        r.config_hash = config_hash(grid[g]);
        r.config = grid[g].to_json();
        r.split_accuracies = accuracies[g];
        r.mean_accuracy = mean(r.split_accuracies);
        r.std_accuracy = stddev(r.split_accuracies);
        r.wall_times_sec = times[g];
        r.seconds_per_epoch = epoch_times[g];
        r.provenance = kProvenance;
        std::ofstream os(cfg.out_dir + "/run_" + r.config_hash + ".json");
        if (!os) throw DataError("cannot write run record in " + cfg.out_dir);
        os << r.to_json().dump(2) << "\n";
        log_info("grid point " + r.config_hash + " mean accuracy " +
                 format_double(r.mean_accuracy));
        records.push_back(std::move(r));
    }
    return records;
}

std::string cmd_sweep_depth(const ExperimentConfig& cfg, const std::vector<int>& t_list) {
    if (t_list.empty()) throw ConfigError("sweep-depth needs a non-empty t list");
    const Dataset ds = load_dataset(cfg.data);
    fs::create_directories(cfg.out_dir);
    GridPoint gp = cfg.grid().front();

    const std::string path = cfg.out_dir + "/sweep_depth.csv";
    std::ofstream os(path);
    if (!os) throw DataError("cannot open " + path);
    os << "t,mean_accuracy\n";
    for (int t : t_list) {
        gp.steps = t;
        std::vector<double> accs;
        for (size_t s = 0; s < ds.splits.size(); ++s) {
            const TrainConfig tc =
                make_train_config(cfg, gp, cfg.seeds[s % cfg.seeds.size()]);
            accs.push_back(
                train(ds.hypergraph, ds.features, ds.labels, ds.splits[s], tc).test_accuracy);
        }
        os << t << "," << format_double(mean(accs)) << "\n";
    }
    return path;
}

namespace {

json lemma_check_json(const LemmaCheck& check) {
    return {{"empirical", check.empirical}, {"bound", check.bound}, {"ok", check.ok()}};
}

}  // namespace

json cmd_stability(const ExperimentConfig& cfg) {
    const Dataset ds = load_dataset(cfg.data);
    fs::create_directories(cfg.out_dir);
    const GridPoint gp = cfg.grid().front();
    const std::vector<int>& split = ds.splits.front();

    const RhoFunction rho{gp.sigma};
    TransitionMatrix tm = build_transition(ds.hypergraph, rho, true);
    DiffusionOperator op(std::move(tm), {gp.alpha, gp.beta, gp.steps});

    ShkcModel model;
    int epochs_run = cfg.epochs;
    if (!cfg.checkpoint.empty()) {
        model = load_checkpoint(cfg.checkpoint);
        if (model.input_dim() != ds.features.cols())
            throw DataError("checkpoint input dimension does not match features");
    } else {
        const TrainConfig tc = make_train_config(cfg, gp, cfg.seeds.front());
        const Matrix S = op.apply(ds.features);
        TrainResult result = train_on_features(S, ds.labels, split, tc);
        model = std::move(result.best_model);
        epochs_run = static_cast<int>(result.history.size());
    }
    const ShkcModel model_alt = init_params(cfg.seeds.front() + 1, model.input_dim(),
                                            model.hidden_dim(), model.num_classes());

    const LemmaReport lemmas =
        verify_lemma_bounds(ds.hypergraph, rho, op, ds.features, model, model_alt, ds.labels,
                            split);

    int n_test = 0;
    std::vector<char> in_train(ds.hypergraph.num_vertices, 0);
    for (int v : split) in_train[v] = 1;
    for (int v = 0; v < ds.hypergraph.num_vertices; ++v)
        if (!in_train[v] && ds.labels[v] != kUnlabeled) ++n_test;

    TheoryConstants constants;
    constants.c_x = lemmas.c_x;
    constants.c_theta = lemmas.c_theta;
    constants.d_t = lemmas.d_t;
    constants.kappa = lemmas.kappa;
    constants.eta = gp.learning_rate;
    constants.t_steps = epochs_run;
    constants.m = static_cast<int>(split.size());
    constants.n = std::max(n_test, 1);
    constants.alpha = gp.alpha;
    constants.beta = gp.beta;
    constants.diffusion_steps = gp.steps;
    constants.delta = cfg.gap_delta;

    StabilityReport report = stability_constants(constants);
    report.h_max_bound = lemmas.hidden_norm.bound;
    report.empirical_h_max = lemmas.hidden_norm.empirical;
    report.empirical_l1 = lemmas.transition_l1.empirical;

    json out;
    out["config"] = gp.to_json();
    out["constants"] = {{"c_x", constants.c_x},       {"c_theta", constants.c_theta},
                        {"d_t", constants.d_t},       {"kappa", constants.kappa},
                        {"eta", constants.eta},       {"t_steps", constants.t_steps},
                        {"m", constants.m},           {"n", constants.n},
                        {"delta", constants.delta},   {"c_omega", lemmas.c_omega}};
    out["stability"] = {{"c_alpha_beta_l", report.c_alpha_beta_l},
                        {"l_m", report.l_m},
                        {"g_m", report.g_m},
                        {"s_m", report.s_m},
                        {"l_m_kappa", report.l_m_kappa},
                        {"g_m_kappa", report.g_m_kappa},
                        {"s_m_kappa", report.s_m_kappa},
                        {"mu", report.mu},
                        {"mu_overflow", report.mu_overflow}};
    out["gap"] = {{"k_mn", report.gap.k_mn},
                  {"mu_kappa_term", report.gap.mu_kappa_term},
                  {"concentration_term", report.gap.concentration_term},
                  {"total", report.gap.total},
                  {"indicative", report.gap.indicative}};
    out["lemmas"] = {{"hidden_norm", lemma_check_json(lemmas.hidden_norm)},
                     {"hidden_perturbation", lemma_check_json(lemmas.hidden_perturbation)},
                     {"grad_theta", lemma_check_json(lemmas.grad_theta)},
                     {"grad_classifier", lemma_check_json(lemmas.grad_classifier)},
                     {"transition_l1", lemma_check_json(lemmas.transition_l1)}};
    out["all_checks_pass"] = lemmas.violations() == 0;

    std::ofstream os(cfg.out_dir + "/stability.json");
    if (!os) throw DataError("cannot write stability.json in " + cfg.out_dir);
    os << out.dump(2) << "\n";
    lemmas.assert_ok();
    return out;
}

std::string cmd_spectrum(const ExperimentConfig& cfg, const std::vector<double>& thresholds) {
    const Dataset ds = load_dataset(cfg.data);
    fs::create_directories(cfg.out_dir);
    const GridPoint gp = cfg.grid().front();
    TransitionMatrix tm = build_transition(ds.hypergraph, RhoFunction{gp.sigma}, true);
    DiffusionOperator op(std::move(tm), {gp.alpha, gp.beta, gp.steps});
    const std::vector<int> counts = spectrum_histogram(op, thresholds, cfg.dense_cap);

    const std::string path = cfg.out_dir + "/spectrum.csv";
    std::ofstream os(path);
    if (!os) throw DataError("cannot open " + path);
    os << "threshold,count\n";
    for (size_t i = 0; i < thresholds.size(); ++i)
        os << format_double(thresholds[i]) << "," << counts[i] << "\n";
    return path;
}

std::string cmd_kernel(const ExperimentConfig& cfg) {
    const Dataset ds = load_dataset(cfg.data);
    fs::create_directories(cfg.out_dir);
    const GridPoint gp = cfg.grid().front();
    TransitionMatrix tm = build_transition(ds.hypergraph, RhoFunction{gp.sigma}, true);
    DiffusionOperator op(std::move(tm), {gp.alpha, gp.beta, gp.steps});
    const KernelMatrix k = kernel_matrix(op, ds.features, nullptr, cfg.dense_cap);

    const std::string path = cfg.out_dir + "/kernel.csv";
    write_matrix_csv_file(k.values, path);
    return path;
}

double cmd_distance(const ExperimentConfig& cfg, int i, int j) {
    const Dataset ds = load_dataset(cfg.data);
    const GridPoint gp = cfg.grid().front();
    TransitionMatrix tm = build_transition(ds.hypergraph, RhoFunction{gp.sigma}, true);
    const DiffusionOperator op(std::move(tm), {gp.alpha, gp.beta, gp.steps});
    return diffusion_distance(op, ds.features, nullptr, i, j);
}

std::string cmd_knn(const std::string& features_path, int k, double gamma,
                    const std::string& out_path) {
    const Matrix x = read_features_file(features_path);
    const Hypergraph h = build_knn_hypergraph(x, k, gamma);
    write_hypergraph_file(h, out_path);
    return out_path;
}

HypergraphStats cmd_validate(const std::string& hypergraph_path) {
    const Hypergraph h = read_hypergraph_file(hypergraph_path);
    return validate(h);
}

int run_with_exit_code(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const ConfigError& e) {
        log_error(e.what());
        return 2;
    } catch (const NumericalError& e) {
        log_error(e.what());
        return 4;
    } catch (const NonFiniteRho& e) {
        log_error(e.what());
        return 4;
    } catch (const SizeCapExceeded& e) {
        log_error(e.what());
        return 4;
    } catch (const KTooLarge& e) {
        log_error(e.what());
        return 4;
    } catch (const BoundViolation& e) {
        log_error(e.what());
        return 4;
    } catch (const Error& e) {  // remaining data / structural errors
        log_error(e.what());
        return 3;
    } catch (const std::exception& e) {
        log_error(e.what());
        return 1;
    }
}

}  // namespace hyperdiffuse
