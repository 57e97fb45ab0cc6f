#include "pipeline/commands.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "datagen/dataset.hpp"
#include "datagen/plan.hpp"
#include "hpo/bo.hpp"
#include "hpo/space.hpp"
#include "metrics/metrics.hpp"
#include "nn/presets.hpp"
#include "nn/train.hpp"
#include "reducer/reducer.hpp"
#include "sct/config.hpp"

namespace mipred::pipeline {

namespace {

namespace fs = std::filesystem;

std::string fmt_real(const char* pattern, double value) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), pattern, value);
    return buffer;
}

void ensure_parent_dir(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

void write_text_file(const std::string& path, const std::string& content) {
    ensure_parent_dir(path);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

sct::SupplyChainConfig load_parameters(const RunConfig& config) {
    return sct::SupplyChainConfig::from_json_file(config.parameters_path);
}

milp::SolverConfig solver_of(const RunConfig& config) {
    milp::SolverConfig solver;
    solver.mipgap = config.solver_mipgap;
    solver.feasibility_tol = config.solver_feasibility_tol;
    solver.integrality_tol = config.solver_integrality_tol;
    solver.node_limit = config.solver_node_limit;
    solver.time_limit_seconds = config.solver_time_limit_seconds;
    return solver;
}

datagen::GenerationPlan plan_of(const RunConfig& config) {
    datagen::GenerationPlan plan;
    plan.min_patients = config.gen_min_patients;
    plan.max_patients = config.gen_max_patients;
    plan.level_count = config.gen_levels;
    plan.replicates = config.gen_replicates;
    plan.horizon = config.gen_horizon;
    plan.seed = config.seed;
    return plan;
}

// Loads the dataset and recomputes the deterministic split from the seed.
datagen::LabeledDataset load_split_dataset(const RunConfig& config) {
    datagen::LabeledDataset dataset = datagen::load_dataset(config.dataset_path);
    datagen::split_dataset(dataset, config.split_train, config.split_test,
                           config.split_validation, config.seed);
    return dataset;
}

Eigen::MatrixXd features_of(const datagen::LabeledDataset& dataset,
                            const std::vector<int>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), dataset.feature_width);
    for (size_t r = 0; r < rows.size(); ++r) {
        const auto& f = dataset.instances[static_cast<size_t>(rows[r])].features;
        for (int c = 0; c < dataset.feature_width; ++c) {
            out(static_cast<Eigen::Index>(r), c) = f[static_cast<size_t>(c)];
        }
    }
    return out;
}

Eigen::MatrixXd labels_of(const datagen::LabeledDataset& dataset, const std::vector<int>& rows) {
    const int width = static_cast<int>(dataset.label_names.size());
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), width);
    for (size_t r = 0; r < rows.size(); ++r) {
        const auto& l = dataset.instances[static_cast<size_t>(rows[r])].labels;
        for (int c = 0; c < width; ++c) {
            out(static_cast<Eigen::Index>(r), c) = l[static_cast<size_t>(c)];
        }
    }
    return out;
}

metrics::LabelMatrix to_label_matrix(const Eigen::MatrixXd& values, double threshold) {
    metrics::LabelMatrix out(static_cast<size_t>(values.rows()),
                             std::vector<int>(static_cast<size_t>(values.cols()), 0));
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            out[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                values(i, j) >= threshold ? 1 : 0;
        }
    }
    return out;
}

// Hyperparameter search box for the configured network family.
hpo::HyperSpace space_of(const RunConfig& config) {
    hpo::HyperSpace space;
    if (config.network == "ann") {
        space.dims = {
            {"layers", static_cast<double>(config.tune_layers_min),
             static_cast<double>(config.tune_layers_max), hpo::DimensionScale::Linear,
             hpo::DimensionKind::Integer},
            {"neurons", static_cast<double>(config.tune_neurons_min),
             static_cast<double>(config.tune_neurons_max), hpo::DimensionScale::Linear,
             hpo::DimensionKind::Integer},
            {"learning_rate", config.tune_lr_min, config.tune_lr_max,
             hpo::DimensionScale::Log10, hpo::DimensionKind::Real},
            {"epochs", static_cast<double>(config.tune_epochs_min),
             static_cast<double>(config.tune_epochs_max), hpo::DimensionScale::Linear,
             hpo::DimensionKind::Integer},
        };
    } else {
        space.dims = {
            {"learning_rate", config.tune_lr_min, config.tune_lr_max,
             hpo::DimensionScale::Log10, hpo::DimensionKind::Real},
            {"epochs", static_cast<double>(config.tune_epochs_min),
             static_cast<double>(config.tune_epochs_max), hpo::DimensionScale::Linear,
             hpo::DimensionKind::Integer},
            {"dropout1", config.tune_dropout_min, config.tune_dropout_max,
             hpo::DimensionScale::Linear, hpo::DimensionKind::Real},
            {"dropout2", config.tune_dropout_min, config.tune_dropout_max,
             hpo::DimensionScale::Linear, hpo::DimensionKind::Real},
        };
    }
    space.validate();
    return space;
}

struct TrainPlan {
    nn::NetworkSpec spec;
    nn::TrainConfig train;
};

// Builds the architecture and training settings from presets, tuned values
// (when given), and explicit configuration overrides, in that order.
TrainPlan plan_network(const RunConfig& config, int input_width, int label_count,
                       const std::map<std::string, double>* tuned) {
    TrainPlan plan;
    plan.train = nn::default_train_config(config.network);
    const auto tuned_value = [&](const char* name, double fallback) {
        if (tuned == nullptr) return fallback;
        const auto it = tuned->find(name);
        return it == tuned->end() ? fallback : it->second;
    };
    if (config.network == "ann") {
        const int layers = static_cast<int>(tuned_value("layers", 3));
        const int neurons = static_cast<int>(tuned_value("neurons", 200));
        plan.spec = nn::make_dense_spec(input_width, label_count, layers, neurons);
    } else {
        const double d1 = tuned_value("dropout1", 0.0);
        const double d2 = tuned_value("dropout2", 0.3);
        plan.spec = nn::make_conv_spec(input_width, label_count, d1, d2);
    }
    if (tuned != nullptr) {
        plan.train.learning_rate = tuned_value("learning_rate", plan.train.learning_rate);
        plan.train.epochs = static_cast<int>(tuned_value("epochs", plan.train.epochs));
    }
    if (config.learning_rate > 0.0) plan.train.learning_rate = config.learning_rate;
    if (config.epochs > 0) plan.train.epochs = config.epochs;
    plan.train.batch_size = config.batch_size;
    plan.train.positive_weights.assign(static_cast<size_t>(label_count),
                                       config.positive_weight);
    plan.train.seed = config.seed;
    return plan;
}

// Scales each label's positive weight by its training-split imbalance ratio
// (negatives / positives), clamped to [1, 5] so a nearly-empty class cannot
// dominate the loss. Labels without positives keep their base weight.
void apply_label_balance(nn::TrainConfig& train, const Eigen::MatrixXd& train_labels,
                         bool enabled) {
    if (!enabled) return;
    const double rows = static_cast<double>(train_labels.rows());
    for (Eigen::Index j = 0; j < train_labels.cols(); ++j) {
        const double positives = train_labels.col(j).sum();
        if (positives <= 0.0) continue;
        const double ratio = std::clamp((rows - positives) / positives, 1.0, 5.0);
        train.positive_weights[static_cast<size_t>(j)] *= ratio;
    }
}

std::map<std::string, double> read_tuned_settings(const RunConfig& config) {
    std::ifstream in(config.best_theta_path);
    if (!in) {
        throw std::runtime_error("cannot open tuned settings file '" + config.best_theta_path +
                                 "' (run the tuning command first)");
    }
    std::map<std::string, double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, line.find_last_not_of(" \t", eq - 1) + 1);
        const std::string value = line.substr(line.find_first_not_of(" \t", eq + 1));
        if (key == "network") {
            if (value != config.network) {
                throw std::runtime_error("tuned settings are for network '" + value +
                                         "' but train.network is '" + config.network + "'");
            }
            continue;
        }
        values[key] = std::stod(value);
    }
    if (values.empty()) {
        throw std::runtime_error("tuned settings file '" + config.best_theta_path +
                                 "' holds no values");
    }
    return values;
}

std::string describe_split(const datagen::LabeledDataset& dataset) {
    const auto count = [&](datagen::Split s) {
        return static_cast<int>(dataset.indices_of(s).size());
    };
    std::ostringstream out;
    out << count(datagen::Split::Train) << "/" << count(datagen::Split::Test) << "/"
        << count(datagen::Split::Validation) << " train/test/validation";
    return out.str();
}

const std::vector<int>& split_rows(const datagen::LabeledDataset& dataset,
                                   const std::string& name, std::vector<int>& storage) {
    datagen::Split split = datagen::Split::Test;
    if (name == "train") split = datagen::Split::Train;
    else if (name == "validation") split = datagen::Split::Validation;
    else if (name != "test") throw std::runtime_error("unknown split '" + name + "'");
    storage = dataset.indices_of(split);
    if (storage.empty()) throw std::runtime_error("split '" + name + "' is empty");
    return storage;
}

}  // namespace

std::string cmd_gen_data(const RunConfig& config) {
    config.validate();
    const sct::SupplyChainConfig sc = load_parameters(config);
    const datagen::GenerationPlan plan = plan_of(config);
    const std::vector<datagen::GeneratedInstance> instances =
        datagen::generate_instance_set(plan, sc);
    datagen::LabeledDataset dataset =
        datagen::label_instances(instances, sc, solver_of(config), config.threads);
    const datagen::SplitCounts counts = datagen::split_dataset(
        dataset, config.split_train, config.split_test, config.split_validation, config.seed);
    ensure_parent_dir(config.dataset_path);
    datagen::save_dataset(dataset, config.dataset_path);

    std::ostringstream out;
    out << "generated " << instances.size() << " instances (" << config.gen_levels
        << " demand levels x " << plan.distributions.size() << " distributions x "
        << config.gen_replicates << " replicates), patients " << config.gen_min_patients << "-"
        << config.gen_max_patients << "\n";
    out << "labeled " << dataset.size() << " instances";
    int infeasible = 0;
    for (const auto& inst : dataset.instances) {
        if (inst.labels.back() == 1) ++infeasible;
    }
    out << " (" << infeasible << " infeasible)";
    if (!dataset.warnings.empty()) {
        out << "; excluded " << dataset.warnings.size() << " unresolved";
    }
    out << "\n\nlabel distribution by split\n" << counts.to_text();
    out << "\ndataset written to " << config.dataset_path << "\n";
    return out.str();
}

std::string cmd_tune(const RunConfig& config) {
    config.validate();
    const datagen::LabeledDataset dataset = load_split_dataset(config);
    const std::vector<int> train_rows = dataset.indices_of(datagen::Split::Train);
    const std::vector<int> score_rows = dataset.indices_of(datagen::Split::Test);
    if (train_rows.empty() || score_rows.empty()) {
        throw std::runtime_error("tuning needs non-empty train and test splits");
    }
    const Eigen::MatrixXd train_x = features_of(dataset, train_rows);
    const Eigen::MatrixXd train_y = labels_of(dataset, train_rows);
    const Eigen::MatrixXd score_x = features_of(dataset, score_rows);
    const metrics::LabelMatrix score_truth =
        to_label_matrix(labels_of(dataset, score_rows), 0.5);
    const int label_count = static_cast<int>(dataset.label_names.size());

    const hpo::HyperSpace space = space_of(config);
    const hpo::BoObjective objective = [&](const std::vector<double>& theta) {
        std::map<std::string, double> values;
        for (size_t d = 0; d < space.dims.size(); ++d) values[space.dims[d].name] = theta[d];
        TrainPlan plan = plan_network(config, dataset.feature_width, label_count, &values);
        apply_label_balance(plan.train, train_y, config.balance_labels);
        const nn::TrainedModel model =
            nn::train_network(plan.spec, train_x, train_y, dataset.label_names,
                              dataset.feature_scale, plan.train);
        const Eigen::MatrixXd probs = nn::predict_probabilities(model, score_x);
        return metrics::sample_accuracy(score_truth, to_label_matrix(probs, 0.5));
    };

    hpo::BoOptions options;
    options.initial_samples = config.tune_initial_samples;
    options.kappa = config.tune_kappa;
    options.observation_noise = config.tune_noise;
    options.record_wall_time = config.report_timings;
    const hpo::BoResult result =
        hpo::bo_run(objective, space, config.tune_maxiter, config.seed, options);

    // Fresh history per run so identical runs leave identical files.
    ensure_parent_dir(config.tune_history_path);
    fs::remove(config.tune_history_path);
    hpo::append_history(config.tune_history_path, space, result.history);

    std::ostringstream theta_file;
    theta_file << "# tuned hyperparameters\n";
    theta_file << "network = " << config.network << "\n";
    for (size_t d = 0; d < space.dims.size(); ++d) {
        theta_file << space.dims[d].name << " = " << fmt_real("%.17g", result.best_theta[d])
                   << "\n";
    }
    theta_file << "accuracy = " << fmt_real("%.17g", result.best_accuracy) << "\n";
    write_text_file(config.best_theta_path, theta_file.str());

    int failures = 0;
    for (const auto& e : result.history) failures += e.failed ? 1 : 0;
    std::ostringstream out;
    out << "tuned " << config.network << " with " << result.history.size() << " evaluations ("
        << config.tune_initial_samples << " space-filling + " << config.tune_maxiter
        << " guided)";
    if (failures > 0) out << ", " << failures << " failed";
    out << "\nbest test-split exact-match accuracy: " << fmt_real("%.4f", result.best_accuracy)
        << "\n";
    for (size_t d = 0; d < space.dims.size(); ++d) {
        out << "  " << space.dims[d].name << " = " << fmt_real("%.6g", result.best_theta[d])
            << "\n";
    }
    out << "settings written to " << config.best_theta_path << "\nhistory written to "
        << config.tune_history_path << "\n";
    return out.str();
}

std::string cmd_train(const RunConfig& config) {
    config.validate();
    std::map<std::string, double> tuned;
    if (config.train_from_tuned) tuned = read_tuned_settings(config);
    const datagen::LabeledDataset dataset = load_split_dataset(config);
    const std::vector<int> train_rows = dataset.indices_of(datagen::Split::Train);
    const std::vector<int> test_rows = dataset.indices_of(datagen::Split::Test);
    if (train_rows.empty()) throw std::runtime_error("training split is empty");
    const int label_count = static_cast<int>(dataset.label_names.size());
    const Eigen::MatrixXd train_y = labels_of(dataset, train_rows);

    TrainPlan plan = plan_network(config, dataset.feature_width, label_count,
                                  config.train_from_tuned ? &tuned : nullptr);
    apply_label_balance(plan.train, train_y, config.balance_labels);

    const nn::TrainedModel model =
        nn::train_network(plan.spec, features_of(dataset, train_rows), train_y,
                          dataset.label_names, dataset.feature_scale, plan.train);
    ensure_parent_dir(config.model_path);
    nn::save_model(model, config.model_path);

    std::ostringstream out;
    out << "trained " << config.network << " on " << train_rows.size() << " instances ("
        << describe_split(dataset) << ")\n";
    out << "epochs: " << plan.train.epochs
        << ", learning rate: " << fmt_real("%.6g", plan.train.learning_rate)
        << ", final loss: " << fmt_real("%.6f", model.loss_log.back()) << "\n";
    if (config.balance_labels) {
        out << "label weights:";
        for (size_t j = 0; j < plan.train.positive_weights.size(); ++j) {
            out << " " << dataset.label_names[j] << "="
                << fmt_real("%.3g", plan.train.positive_weights[j]);
        }
        out << "\n";
    }
    if (!test_rows.empty()) {
        const Eigen::MatrixXd probs =
            nn::predict_probabilities(model, features_of(dataset, test_rows));
        const metrics::MetricsReport report =
            metrics::evaluate(to_label_matrix(labels_of(dataset, test_rows), 0.5),
                              to_label_matrix(probs, 0.5), dataset.label_names);
        out << "\ntest-split metrics\n" << report.to_text() << "\n" << report.to_table();
    }
    out << "\nmodel written to " << config.model_path << "\n";
    return out.str();
}

std::string cmd_evaluate(const RunConfig& config) {
    config.validate();
    const datagen::LabeledDataset dataset = load_split_dataset(config);
    const nn::TrainedModel model = nn::load_model(config.model_path);
    if (model.label_names != dataset.label_names) {
        throw std::runtime_error("model and dataset disagree on label names");
    }
    std::vector<int> storage;
    const std::vector<int>& rows = split_rows(dataset, config.evaluate_split, storage);

    const Eigen::MatrixXd probs = nn::predict_probabilities(model, features_of(dataset, rows));
    const metrics::LabelMatrix truth = to_label_matrix(labels_of(dataset, rows), 0.5);
    const metrics::LabelMatrix predicted = to_label_matrix(probs, 0.5);
    const metrics::MetricsReport report =
        metrics::evaluate(truth, predicted, dataset.label_names);
    const metrics::MlcmMatrix mlcm =
        metrics::mlcm_confusion(truth, predicted, dataset.label_names);

    write_text_file(config.metrics_path, report.to_text() + "\n" + report.to_table());
    write_text_file(config.mlcm_path, "== label confusion counts ==\n" + mlcm.to_text(false) +
                                          "\n== row-normalized ==\n" + mlcm.to_text(true));

    std::ostringstream out;
    out << "evaluated " << rows.size() << " instances from the " << config.evaluate_split
        << " split\n\n";
    out << report.to_text();
    out << "\nmetrics written to " << config.metrics_path << "\nconfusion matrix written to "
        << config.mlcm_path << "\n";
    return out.str();
}

std::string cmd_solve(const RunConfig& config, const std::string& instance_path) {
    config.validate();
    std::vector<std::string> paths;
    if (fs::is_directory(instance_path)) {
        for (const auto& entry : fs::directory_iterator(instance_path)) {
            if (entry.is_regular_file()) paths.push_back(entry.path().string());
        }
        std::sort(paths.begin(), paths.end());
        if (paths.empty()) {
            throw std::runtime_error("no instance files in directory '" + instance_path + "'");
        }
    } else {
        paths.push_back(instance_path);
    }

    const sct::SupplyChainConfig sc = load_parameters(config);
    const nn::TrainedModel model = nn::load_model(config.model_path);
    const reducer::ReductionMode mode = reducer::parse_mode(config.solve_mode);
    reducer::PipelineOptions options;
    options.compare_full = config.compare_full;
    options.record_wall_time = config.report_timings;
    const milp::SolverConfig solver = solver_of(config);

    fs::create_directories(config.report_dir);
    std::ostringstream summary_table;
    summary_table << reducer::ReductionReport::summary_header() << "\n";
    std::ostringstream out;
    std::map<std::string, int> outcome_counts;
    for (const std::string& path : paths) {
        const sct::DemandProfile demand = sct::DemandProfile::load(path, sc);
        const reducer::ReductionReport report =
            reducer::pipeline_solve(model, demand, config.k_prob, mode, sc, solver, options);
        const std::string stem = fs::path(path).stem().string();
        const std::string report_path =
            (fs::path(config.report_dir) / (stem + ".report.txt")).string();
        write_text_file(report_path, report.to_text());
        summary_table << report.summary_row(stem) << "\n";
        ++outcome_counts[report.full_solved ? reducer::outcome_name(report.outcome)
                                            : reducer::verdict_name(report.decision.verdict)];
        if (paths.size() == 1) out << report.to_text() << "\n";
    }
    const std::string summary_path =
        (fs::path(config.report_dir) / "summary.tsv").string();
    write_text_file(summary_path, summary_table.str());

    out << "solved " << paths.size() << (paths.size() == 1 ? " instance" : " instances")
        << " at k_prob " << fmt_real("%.4g", config.k_prob) << " in "
        << reducer::mode_name(mode) << " mode\n";
    for (const auto& [name, count] : outcome_counts) {
        out << "  " << name << ": " << count << "\n";
    }
    out << "reports written to " << config.report_dir << "\nsummary written to " << summary_path
        << "\n";
    return out.str();
}

}  // namespace mipred::pipeline
