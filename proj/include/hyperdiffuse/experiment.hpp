#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyperdiffuse/analysis.hpp"
#include "hyperdiffuse/io.hpp"

namespace hyperdiffuse {

struct DatasetPaths {
    std::string hypergraph;
    std::string features;
    std::string labels;
    std::string splits_dir;
};

/// One cell of the hyperparameter grid.
struct GridPoint {
    double alpha = 1.0;
    double beta = 1.0;
    int steps = 1;
    double sigma = 0.0;
    double learning_rate = 0.01;
    double weight_decay = 0.0;
    int hidden = 128;

    nlohmann::json to_json() const;
};

/// Experiment configuration; grids default to the full search ranges when a
/// field is omitted from the JSON file.
struct ExperimentConfig {
    DatasetPaths data;
    std::vector<double> alphas;
    std::vector<double> betas;
    std::vector<int> steps;
    std::vector<double> sigmas;
    std::vector<double> learning_rates;
    std::vector<double> weight_decays;
    std::vector<int> hidden_dims;
    int epochs = 1000;
    int patience = 100;
    Optimizer optimizer = Optimizer::adam;
    std::vector<std::uint64_t> seeds = {0};
    std::string out_dir = ".";
    std::string checkpoint;  // optional, used by the stability command
    double gap_delta = 0.1;
    int threads = 1;
    int dense_cap = kDefaultDenseCap;

    std::vector<GridPoint> grid() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct Dataset {
    Hypergraph hypergraph;
    Matrix features;
    std::vector<int> labels;
    std::vector<std::vector<int>> splits;
};

Dataset load_dataset(const DatasetPaths& paths);

/// Result of one grid point over all splits. mean/std are recomputed from
/// the stored per-split accuracies on load and must agree.
struct RunRecord {
    std::string config_hash;
    nlohmann::json config;
    std::vector<double> split_accuracies;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    std::vector<double> wall_times_sec;
    std::vector<double> seconds_per_epoch;
    std::string provenance;

    nlohmann::json to_json() const;
    static RunRecord from_json(const nlohmann::json& j);
};

RunRecord load_run_record(const std::string& path);

/// FNV-1a hash of a grid point's canonical JSON, hex-encoded.
std::string config_hash(const GridPoint& gp);

double mean(const std::vector<double>& xs);
double stddev(const std::vector<double>& xs);

/// Trains every grid point over every split (parallel over jobs when
/// threads > 1), writing run_<hash>.json and epochs_<hash>_split<k>.csv
/// under out_dir. Returns the records in grid order.
std::vector<RunRecord> cmd_train(const ExperimentConfig& cfg);

/// One train per t per split at the first grid point of the remaining
/// dimensions; writes out_dir/sweep_depth.csv and returns its path.
std::string cmd_sweep_depth(const ExperimentConfig& cfg, const std::vector<int>& t_list);

/// Measures constants from a run at the first grid point (training a model
/// unless cfg.checkpoint is set), evaluates the stability formulas and lemma
/// checks, writes out_dir/stability.json and returns the JSON document.
nlohmann::json cmd_stability(const ExperimentConfig& cfg);

/// Eigenvalue counts of the dense diffusion operator at the first grid
/// point; writes out_dir/spectrum.csv ("threshold,count").
std::string cmd_spectrum(const ExperimentConfig& cfg, const std::vector<double>& thresholds);

/// Kernel matrix at the first grid point (Theta absent); writes
/// out_dir/kernel.csv.
std::string cmd_kernel(const ExperimentConfig& cfg);

/// Diffusion distance between two vertices at the first grid point.
double cmd_distance(const ExperimentConfig& cfg, int i, int j);

/// kNN hypergraph construction from a feature CSV to a hypergraph file.
std::string cmd_knn(const std::string& features_path, int k, double gamma,
                    const std::string& out_path);

/// Validates a hypergraph file and returns its statistics.
HypergraphStats cmd_validate(const std::string& hypergraph_path);

/// Runs a command body and maps exceptions to the CLI exit codes:
/// 0 success, 2 config error, 3 data error, 4 numerical failure.
int run_with_exit_code(const std::function<void()>& body);

}  // namespace hyperdiffuse
