#include "pipeline/run_config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace mipred::pipeline {

namespace {

struct Binding {
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

std::string trim(const std::string& text) {
    size_t first = 0;
    size_t last = text.size();
    while (first < last && std::isspace(static_cast<unsigned char>(text[first]))) ++first;
    while (last > first && std::isspace(static_cast<unsigned char>(text[last - 1]))) --last;
    return text.substr(first, last - first);
}

std::string format_real(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

long long parse_integer(const std::string& key, const std::string& value) {
    size_t used = 0;
    long long parsed = 0;
    try {
        parsed = std::stoll(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("configuration key '" + key + "': '" + value +
                                    "' is not an integer");
    }
    if (used != value.size()) {
        throw std::invalid_argument("configuration key '" + key + "': '" + value +
                                    "' is not an integer");
    }
    return parsed;
}

double parse_real(const std::string& key, const std::string& value) {
    size_t used = 0;
    double parsed = 0.0;
    try {
        parsed = std::stod(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("configuration key '" + key + "': '" + value +
                                    "' is not a number");
    }
    if (used != value.size()) {
        throw std::invalid_argument("configuration key '" + key + "': '" + value +
                                    "' is not a number");
    }
    return parsed;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw std::invalid_argument("configuration key '" + key + "': '" + value +
                                "' is not a boolean (true/false)");
}

Binding string_binding(std::string key, std::string RunConfig::*member) {
    return {key, [member](const RunConfig& c) { return c.*member; },
            [member](RunConfig& c, const std::string& v) { c.*member = v; }};
}

Binding int_binding(std::string key, int RunConfig::*member) {
    return {key, [member](const RunConfig& c) { return std::to_string(c.*member); },
            [key, member](RunConfig& c, const std::string& v) {
                c.*member = static_cast<int>(parse_integer(key, v));
            }};
}

Binding long_binding(std::string key, long RunConfig::*member) {
    return {key, [member](const RunConfig& c) { return std::to_string(c.*member); },
            [key, member](RunConfig& c, const std::string& v) {
                c.*member = static_cast<long>(parse_integer(key, v));
            }};
}

Binding u64_binding(std::string key, std::uint64_t RunConfig::*member) {
    return {key, [member](const RunConfig& c) { return std::to_string(c.*member); },
            [key, member](RunConfig& c, const std::string& v) {
                const long long parsed = parse_integer(key, v);
                if (parsed < 0) {
                    throw std::invalid_argument("configuration key '" + key +
                                                "' must be non-negative");
                }
                c.*member = static_cast<std::uint64_t>(parsed);
            }};
}

Binding real_binding(std::string key, double RunConfig::*member) {
    return {key, [member](const RunConfig& c) { return format_real(c.*member); },
            [key, member](RunConfig& c, const std::string& v) {
                c.*member = parse_real(key, v);
            }};
}

Binding bool_binding(std::string key, bool RunConfig::*member) {
    return {key, [member](const RunConfig& c) { return c.*member ? "true" : "false"; },
            [key, member](RunConfig& c, const std::string& v) {
                c.*member = parse_bool(key, v);
            }};
}

const std::vector<Binding>& bindings() {
    static const std::vector<Binding> table = {
        string_binding("paths.parameters", &RunConfig::parameters_path),
        string_binding("paths.dataset", &RunConfig::dataset_path),
        string_binding("paths.model", &RunConfig::model_path),
        string_binding("paths.best_theta", &RunConfig::best_theta_path),
        string_binding("paths.tune_history", &RunConfig::tune_history_path),
        string_binding("paths.metrics", &RunConfig::metrics_path),
        string_binding("paths.mlcm", &RunConfig::mlcm_path),
        string_binding("paths.report_dir", &RunConfig::report_dir),
        u64_binding("seed", &RunConfig::seed),
        int_binding("threads", &RunConfig::threads),
        int_binding("gen.levels", &RunConfig::gen_levels),
        int_binding("gen.replicates", &RunConfig::gen_replicates),
        int_binding("gen.min_patients", &RunConfig::gen_min_patients),
        int_binding("gen.max_patients", &RunConfig::gen_max_patients),
        int_binding("gen.horizon", &RunConfig::gen_horizon),
        real_binding("split.train", &RunConfig::split_train),
        real_binding("split.test", &RunConfig::split_test),
        real_binding("split.validation", &RunConfig::split_validation),
        string_binding("train.network", &RunConfig::network),
        real_binding("train.learning_rate", &RunConfig::learning_rate),
        int_binding("train.epochs", &RunConfig::epochs),
        int_binding("train.batch_size", &RunConfig::batch_size),
        real_binding("train.positive_weight", &RunConfig::positive_weight),
        bool_binding("train.balance_labels", &RunConfig::balance_labels),
        bool_binding("train.from_tuned", &RunConfig::train_from_tuned),
        int_binding("tune.maxiter", &RunConfig::tune_maxiter),
        int_binding("tune.initial_samples", &RunConfig::tune_initial_samples),
        real_binding("tune.kappa", &RunConfig::tune_kappa),
        real_binding("tune.noise", &RunConfig::tune_noise),
        int_binding("tune.layers_min", &RunConfig::tune_layers_min),
        int_binding("tune.layers_max", &RunConfig::tune_layers_max),
        int_binding("tune.neurons_min", &RunConfig::tune_neurons_min),
        int_binding("tune.neurons_max", &RunConfig::tune_neurons_max),
        real_binding("tune.learning_rate_min", &RunConfig::tune_lr_min),
        real_binding("tune.learning_rate_max", &RunConfig::tune_lr_max),
        int_binding("tune.epochs_min", &RunConfig::tune_epochs_min),
        int_binding("tune.epochs_max", &RunConfig::tune_epochs_max),
        real_binding("tune.dropout_min", &RunConfig::tune_dropout_min),
        real_binding("tune.dropout_max", &RunConfig::tune_dropout_max),
        real_binding("solver.mipgap", &RunConfig::solver_mipgap),
        real_binding("solver.feasibility_tol", &RunConfig::solver_feasibility_tol),
        real_binding("solver.integrality_tol", &RunConfig::solver_integrality_tol),
        long_binding("solver.node_limit", &RunConfig::solver_node_limit),
        real_binding("solver.time_limit_seconds", &RunConfig::solver_time_limit_seconds),
        real_binding("solve.k_prob", &RunConfig::k_prob),
        string_binding("solve.mode", &RunConfig::solve_mode),
        bool_binding("solve.compare_full", &RunConfig::compare_full),
        bool_binding("solve.report_timings", &RunConfig::report_timings),
        string_binding("evaluate.split", &RunConfig::evaluate_split),
    };
    return table;
}

const Binding& find_binding(const std::string& key) {
    for (const Binding& b : bindings()) {
        if (b.key == key) return b;
    }
    throw std::invalid_argument("unknown configuration key '" + key + "'");
}

}  // namespace

void RunConfig::validate() const {
    const auto fail = [](const std::string& message) {
        throw std::invalid_argument("configuration: " + message);
    };
    if (network != "ann" && network != "cnn") fail("train.network must be ann or cnn");
    if (solve_mode != "reduce" && solve_mode != "fix") fail("solve.mode must be reduce or fix");
    if (evaluate_split != "train" && evaluate_split != "test" &&
        evaluate_split != "validation") {
        fail("evaluate.split must be train, test, or validation");
    }
    if (!(k_prob > 0.0 && k_prob < 1.0)) fail("solve.k_prob must lie strictly in (0, 1)");
    if (learning_rate < 0.0) fail("train.learning_rate must be non-negative (0 = preset)");
    if (epochs < 0) fail("train.epochs must be non-negative (0 = preset)");
    if (batch_size < 0) fail("train.batch_size must be non-negative (0 = full batch)");
    if (positive_weight <= 0.0) fail("train.positive_weight must be positive");
    if (tune_maxiter < 0) fail("tune.maxiter must be non-negative");
    if (tune_initial_samples < 2) fail("tune.initial_samples must be at least 2");
    if (tune_layers_min < 1 || tune_layers_max < tune_layers_min) {
        fail("tune.layers bounds must satisfy 1 <= min <= max");
    }
    if (tune_neurons_min < 1 || tune_neurons_max < tune_neurons_min) {
        fail("tune.neurons bounds must satisfy 1 <= min <= max");
    }
    if (!(tune_lr_min > 0.0) || !(tune_lr_max > tune_lr_min)) {
        fail("tune.learning_rate bounds must satisfy 0 < min < max");
    }
    if (tune_epochs_min < 1 || tune_epochs_max < tune_epochs_min) {
        fail("tune.epochs bounds must satisfy 1 <= min <= max");
    }
    if (tune_dropout_min < 0.0 || tune_dropout_max < tune_dropout_min ||
        tune_dropout_max >= 1.0) {
        fail("tune.dropout bounds must satisfy 0 <= min <= max < 1");
    }
    if (solver_mipgap < 0.0) fail("solver.mipgap must be non-negative");
    if (solver_node_limit < 1) fail("solver.node_limit must be positive");
    if (threads < 0) fail("threads must be non-negative");
    if (gen_horizon < 1) fail("gen.horizon must be positive");
}

const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const Binding& b : bindings()) out.push_back(b.key);
        return out;
    }();
    return names;
}

std::string RunConfig::get(const std::string& key) const { return find_binding(key).get(*this); }

void RunConfig::set(const std::string& key, const std::string& value) {
    find_binding(key).set(*this, value);
}

RunConfig RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open configuration file '" + path + "'");
    RunConfig config;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const size_t eq = text.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("configuration file '" + path + "' line " +
                                     std::to_string(line_number) + ": expected key = value");
        }
        try {
            config.set(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
        } catch (const std::exception& e) {
            throw std::runtime_error("configuration file '" + path + "' line " +
                                     std::to_string(line_number) + ": " + e.what());
        }
    }
    return config;
}

std::string RunConfig::to_text() const {
    std::ostringstream out;
    out << "# run configuration\n";
    for (const Binding& b : bindings()) out << b.key << " = " << b.get(*this) << "\n";
    return out.str();
}

void RunConfig::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write configuration file '" + path + "'");
    out << to_text();
    if (!out) throw std::runtime_error("failed while writing configuration file '" + path + "'");
}

}  // namespace mipred::pipeline
