// Command-line front end for the mipred pipeline. Parses arguments, maps them
// onto the flat run configuration, and drives the library through its C API.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mipred.h"

namespace {

struct ConfigGuard {
    mipred_config* handle = nullptr;
    ~ConfigGuard() { mipred_config_free(handle); }
};

int report_failure(const char* stage) {
    std::fprintf(stderr, "mipred %s failed: %s\n", stage, mipred_last_error());
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mipred — learned reduction heuristics for mixed-integer programs"};
    app.set_version_flag("--version", std::string(mipred_version()));
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("-c,--config", config_path, "configuration file (key = value lines)");
    app.add_option("--set", overrides, "override one configuration key (key=value)")
        ->take_all();

    auto* gen = app.add_subcommand(
        "gen-data", "generate, solve-label, split, and save the instance dataset");
    auto* tune = app.add_subcommand(
        "tune", "search the hyperparameter box with Bayesian optimization");
    auto* train = app.add_subcommand("train", "train the classifier and save the model");
    auto* evaluate = app.add_subcommand(
        "evaluate", "report metrics and the confusion matrix on a dataset split");
    auto* solve = app.add_subcommand(
        "solve", "predict-and-solve a demand file (or every file in a directory)");
    for (auto* sub : {gen, tune, train, evaluate, solve}) sub->fallthrough();

    std::string instance_path;
    std::string k_prob;
    std::string mode;
    bool compare_full = false;
    solve->add_option("instance", instance_path, "demand file or directory of demand files")
        ->required();
    solve->add_option("--k-prob", k_prob, "probability threshold for keeping a facility");
    solve->add_option("--mode", mode, "reduce (rebuild on the kept subset) or fix (pin values)");
    solve->add_flag("--compare-full", compare_full,
                    "also solve the unreduced model and classify the outcome");

    CLI11_PARSE(app, argc, argv);

    ConfigGuard config;
    if (!config_path.empty()) {
        if (mipred_config_load(config_path.c_str(), &config.handle) != MIPRED_OK) {
            return report_failure("configuration");
        }
    } else if (mipred_config_create(&config.handle) != MIPRED_OK) {
        return report_failure("configuration");
    }

    for (const std::string& entry : overrides) {
        const size_t eq = entry.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "mipred: --set expects key=value, got '%s'\n", entry.c_str());
            return 1;
        }
        if (mipred_config_set(config.handle, entry.substr(0, eq).c_str(),
                              entry.substr(eq + 1).c_str()) != MIPRED_OK) {
            return report_failure("configuration");
        }
    }
    if (!k_prob.empty() &&
        mipred_config_set(config.handle, "solve.k_prob", k_prob.c_str()) != MIPRED_OK) {
        return report_failure("configuration");
    }
    if (!mode.empty() &&
        mipred_config_set(config.handle, "solve.mode", mode.c_str()) != MIPRED_OK) {
        return report_failure("configuration");
    }
    if (compare_full &&
        mipred_config_set(config.handle, "solve.compare_full", "true") != MIPRED_OK) {
        return report_failure("configuration");
    }

    char* summary = nullptr;
    int rc = MIPRED_OK;
    const char* stage = "";
    if (gen->parsed()) {
        stage = "gen-data";
        rc = mipred_run_gen_data(config.handle, &summary);
    } else if (tune->parsed()) {
        stage = "tune";
        rc = mipred_run_tune(config.handle, &summary);
    } else if (train->parsed()) {
        stage = "train";
        rc = mipred_run_train(config.handle, &summary);
    } else if (evaluate->parsed()) {
        stage = "evaluate";
        rc = mipred_run_evaluate(config.handle, &summary);
    } else if (solve->parsed()) {
        stage = "solve";
        rc = mipred_run_solve(config.handle, instance_path.c_str(), &summary);
    }

    if (rc != MIPRED_OK) return report_failure(stage);
    if (summary != nullptr) {
        std::fputs(summary, stdout);
        mipred_string_free(summary);
    }
    return 0;
}
