#pragma once

#include <string>

#include "pipeline/run_config.hpp"

namespace mipred::pipeline {

// Each command runs one batch stage end to end, writes its artifacts to the
// configured paths, and returns a printable summary. All of them are
// deterministic for a fixed configuration and seed (identical output bytes),
// so reruns can be verified by checksum. Failures throw with a message that
// names the failing stage.

// Generate the instance grid, label it with the exact solver, split it, and
// save the dataset; summarizes the label distribution per split.
std::string cmd_gen_data(const RunConfig& config);

// Bayesian-optimization search over the network's hyperparameter box,
// training on the train split and scoring exact-match accuracy on the
// validation split; persists the best settings and the evaluation history.
std::string cmd_tune(const RunConfig& config);

// Train the configured network (optionally from the tuned settings file) and
// save the model; summarizes test-split metrics.
std::string cmd_train(const RunConfig& config);

// Evaluate a saved model on the chosen split; writes the metric report and
// the label confusion matrix.
std::string cmd_evaluate(const RunConfig& config);

// Predict-and-solve for one demand file, or for every file in a directory;
// writes one report per instance plus a fresh batch summary table.
std::string cmd_solve(const RunConfig& config, const std::string& instance_path);

}  // namespace mipred::pipeline
