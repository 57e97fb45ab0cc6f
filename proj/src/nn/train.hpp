#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "nn/network.hpp"

namespace mipred::nn {

struct TrainConfig {
    int epochs = 1000;
    double learning_rate = 1e-3;
    int batch_size = 0;  // 0 = full batch
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::vector<double> positive_weights;  // empty = 1 for every label
    std::uint64_t seed = 1;

    void validate(int label_count) const;
};

// A trained classifier: architecture, learned parameters, the feature scaling
// frozen at train time, and the per-epoch loss history.
struct TrainedModel {
    NetworkSpec spec;
    std::vector<LayerParams> params;
    std::vector<std::string> label_names;
    double feature_scale = 1.0;      // raw features are divided by this
    double train_feature_max = 0.0;  // audit statistic from the training split
    std::vector<double> loss_log;
};

// Trains from He-uniform initialization with Adam on multi-label BCE.
// `features` are raw (unscaled) rows; `labels` are 0/1 rows, one column per
// entry of `label_names`. Deterministic for a fixed config seed. Throws if the
// loss leaves the finite range (divergence guard).
TrainedModel train_network(const NetworkSpec& spec, const Eigen::MatrixXd& features,
                           const Eigen::MatrixXd& labels,
                           const std::vector<std::string>& label_names, double feature_scale,
                           const TrainConfig& config);

// Eval-mode logits for raw features (scaling applied internally).
Eigen::MatrixXd model_logits(const TrainedModel& model, const Eigen::MatrixXd& features);

// Sigmoid of the eval-mode logits: independent per-label probabilities in (0,1).
Eigen::MatrixXd predict_probabilities(const TrainedModel& model,
                                      const Eigen::MatrixXd& features);

// Structured-text model files (versioned, row-major parameters, lossless
// round-trip of every coefficient).
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace mipred::nn
