#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyperdiffuse/experiment.hpp"

using namespace hyperdiffuse;

int main(int argc, char** argv) {
    CLI::App app{"hypergraph diffusion kernels, SHKC training and stability reports"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    int dense_cap = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config JSON")->required();
        cmd->add_option("--out-dir", out_dir, "output directory (overrides config)");
        cmd->add_option("--seed", seed, "seed (overrides config seeds)")
            ->each([&](const std::string&) { seed_set = true; });
        cmd->add_option("--threads", threads, "worker threads (overrides config)");
        cmd->add_option("--dense-cap", dense_cap, "dense materialization cap (overrides config)");
    };

    CLI::App* train = app.add_subcommand("train", "grid search over splits");
    add_common(train);

    CLI::App* sweep = app.add_subcommand("sweep-depth", "accuracy vs diffusion steps");
    add_common(sweep);
    std::vector<int> t_list;
    sweep->add_option("--t-list", t_list, "diffusion steps to sweep")->required();

    CLI::App* stability = app.add_subcommand("stability", "stability bound report");
    add_common(stability);
    std::string checkpoint;
    stability->add_option("--checkpoint", checkpoint, "model checkpoint (skips training)");

    CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalue counts of A(t)");
    add_common(spectrum);
    std::vector<double> thresholds{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    spectrum->add_option("--thresholds", thresholds, "eigenvalue thresholds");

    CLI::App* kernel = app.add_subcommand("kernel", "diffusion kernel matrix CSV");
    add_common(kernel);
    std::vector<int> distance_pair;
    kernel->add_option("--distance", distance_pair,
                       "print the diffusion distance between two vertices instead")
        ->expected(2);

    CLI::App* knn = app.add_subcommand("knn", "build kNN hypergraph from features");
    std::string features_path, knn_out;
    int k = 6;
    double gamma = 1.0;
    knn->add_option("--features", features_path, "feature CSV")->required();
    knn->add_option("-k,--neighbors", k, "neighbors per centroid");
    knn->add_option("--gamma", gamma, "Gaussian flatness");
    knn->add_option("--out", knn_out, "output hypergraph file")->required();

    CLI::App* validate_cmd = app.add_subcommand("validate", "validate a hypergraph file");
    std::string hypergraph_path;
    validate_cmd->add_option("--hypergraph", hypergraph_path, "hypergraph file")->required();

    CLI11_PARSE(app, argc, argv);

    auto config_with_overrides = [&]() {
        ExperimentConfig cfg = load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed_set) cfg.seeds = {seed};
        if (threads > 0) cfg.threads = threads;
        if (dense_cap > 0) cfg.dense_cap = dense_cap;
        if (!checkpoint.empty()) cfg.checkpoint = checkpoint;
        return cfg;
    };

    return run_with_exit_code([&] {
        if (train->parsed()) {
            const auto records = cmd_train(config_with_overrides());
            for (const RunRecord& r : records)
                std::printf("%s mean=%.4f std=%.4f\n", r.config_hash.c_str(), r.mean_accuracy,
                            r.std_accuracy);
        } else if (sweep->parsed()) {
            std::printf("%s\n", cmd_sweep_depth(config_with_overrides(), t_list).c_str());
        } else if (stability->parsed()) {
            const auto report = cmd_stability(config_with_overrides());
            std::printf("%s\n", report.dump(2).c_str());
        } else if (spectrum->parsed()) {
            std::printf("%s\n", cmd_spectrum(config_with_overrides(), thresholds).c_str());
        } else if (kernel->parsed()) {
            if (distance_pair.size() == 2)
                std::printf("%.17g\n", cmd_distance(config_with_overrides(), distance_pair[0],
                                                    distance_pair[1]));
            else
                std::printf("%s\n", cmd_kernel(config_with_overrides()).c_str());
        } else if (knn->parsed()) {
            std::printf("%s\n", cmd_knn(features_path, k, gamma, knn_out).c_str());
        } else if (validate_cmd->parsed()) {
            const HypergraphStats stats = cmd_validate(hypergraph_path);
            std::printf("E=%d D=%d isolated=%zu\n", stats.max_edge_size,
                        stats.max_vertex_degree, stats.isolated_vertices.size());
        }
    });
}
