#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mipred::pipeline {

// One flat configuration drives every command; fields group by dotted key
// prefix (paths., gen., split., train., tune., solver., solve., evaluate.).
// Values are plain text so runs diff cleanly and replay exactly.
struct RunConfig {
    // paths
    std::string parameters_path = "data/desk_params.json";
    std::string dataset_path = "out/dataset.tsv";
    std::string model_path = "out/model.txt";
    std::string best_theta_path = "out/best_theta.txt";
    std::string tune_history_path = "out/tune_history.tsv";
    std::string metrics_path = "out/metrics.txt";
    std::string mlcm_path = "out/mlcm.txt";
    std::string report_dir = "out/reports";

    // shared
    std::uint64_t seed = 1;
    int threads = 0;  // labeling workers; 0 = hardware count

    // generation grid
    int gen_levels = 10;
    int gen_replicates = 5;
    int gen_min_patients = 2;
    int gen_max_patients = 6;
    int gen_horizon = 90;

    // dataset split
    double split_train = 0.8;
    double split_test = 0.1;
    double split_validation = 0.1;

    // training
    std::string network = "ann";     // ann | cnn
    double learning_rate = 0.0;      // 0 = preset default
    int epochs = 0;                  // 0 = preset default
    int batch_size = 0;              // 0 = full batch
    double positive_weight = 1.0;    // applied to every label
    // Per-label class balancing: scale each label's positive weight by
    // (negatives / positives) on the training split, clamped to [1, 5].
    // Recovers recall on rare labels, which matters when a low solve.k_prob
    // makes a dropped facility far costlier than a kept spare.
    bool balance_labels = false;
    bool train_from_tuned = false;   // read the tuned settings file first

    // hyperparameter tuning
    int tune_maxiter = 20;
    int tune_initial_samples = 5;
    double tune_kappa = 2.0;
    double tune_noise = 1e-6;
    // dense-network search box
    int tune_layers_min = 1;
    int tune_layers_max = 3;
    int tune_neurons_min = 50;
    int tune_neurons_max = 256;
    double tune_lr_min = 1e-4;  // log-scaled dimension
    double tune_lr_max = 1e-1;
    int tune_epochs_min = 500;
    int tune_epochs_max = 4000;
    // convolutional search box (architecture is fixed; regularization tuned)
    double tune_dropout_min = 0.0;
    double tune_dropout_max = 0.5;

    // exact solver
    double solver_mipgap = 1e-4;
    double solver_feasibility_tol = 1e-7;
    double solver_integrality_tol = 1e-6;
    long solver_node_limit = 500000;
    double solver_time_limit_seconds = 0.0;

    // reduced solving
    double k_prob = 0.5;
    std::string solve_mode = "reduce";  // reduce | fix
    bool compare_full = false;
    bool report_timings = false;

    // evaluation
    std::string evaluate_split = "test";  // train | test | validation

    void validate() const;

    // Key/value access used by the configuration file and flag overrides.
    static const std::vector<std::string>& keys();
    std::string get(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    // `key = value` lines with # comments; unknown keys are errors.
    static RunConfig load_file(const std::string& path);
    void save_file(const std::string& path) const;
    std::string to_text() const;
};

}  // namespace mipred::pipeline
