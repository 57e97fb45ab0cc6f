#include "datagen/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sct/solution.hpp"
#include "util/rng.hpp"

namespace mipred::datagen {

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("dataset: " + msg);
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

using util::uniform01;

}  // namespace

std::vector<int> LabeledDataset::indices_of(Split s) const {
    std::vector<int> out;
    for (size_t i = 0; i < split.size(); ++i) {
        if (split[i] == s) out.push_back(static_cast<int>(i));
    }
    return out;
}

void LabeledDataset::validate() const {
    if (label_names.empty() || label_names.back() != "infeasible")
        fail("label names must end with the infeasible flag");
    for (size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        if (static_cast<int>(inst.features.size()) != feature_width)
            fail("instance " + std::to_string(i) + " has a bad feature width");
        if (inst.labels.size() != label_names.size())
            fail("instance " + std::to_string(i) + " has a bad label width");
        double total = 0.0;
        for (double f : inst.features) {
            if (f < 0.0) fail("negative feature at instance " + std::to_string(i));
            total += f;
        }
        if (std::abs(total - inst.level) > 1e-9)
            fail("instance " + std::to_string(i) + " features sum to " + format_real(total) +
                 " but the level is " + std::to_string(inst.level));
        for (int v : inst.labels) {
            if (v != 0 && v != 1) fail("labels must be 0/1 at instance " + std::to_string(i));
        }
        if (inst.labels.back() == 1) {
            for (size_t j = 0; j + 1 < inst.labels.size(); ++j) {
                if (inst.labels[j] != 0)
                    fail("infeasible instance " + std::to_string(i) + " carries facility labels");
            }
        }
    }
    if (!split.empty() && split.size() != instances.size())
        fail("split assignment does not match the instance count");
}

LabeledDataset label_instances(const std::vector<GeneratedInstance>& instances,
                               const sct::SupplyChainConfig& config,
                               const milp::SolverConfig& solver, int threads) {
    LabeledDataset ds;
    for (const auto& f : config.facilities) ds.label_names.push_back(f.name);
    ds.label_names.push_back("infeasible");
    ds.feature_scale = static_cast<double>(config.daily_center_cap) * config.center_count();
    if (instances.empty()) return ds;
    ds.feature_width = instances.front().demand.horizon;

    struct Slot {
        bool keep = false;
        LabeledInstance inst;
        std::string warning;
    };
    std::vector<Slot> slots(instances.size());

    std::vector<int> all(static_cast<size_t>(config.facility_count()));
    for (size_t m = 0; m < all.size(); ++m) all[m] = static_cast<int>(m);

    auto work = [&](size_t i) {
        const GeneratedInstance& gen = instances[i];
        Slot& slot = slots[i];
        LabeledInstance& inst = slot.inst;
        inst.features = gen.demand.daily_totals(gen.demand.horizon);
        inst.labels.assign(ds.label_names.size(), 0);
        inst.level = gen.meta.level;
        inst.distribution = distribution_name(gen.meta.distribution);
        inst.replicate = gen.meta.replicate;
        inst.seed = gen.meta.seed;

        const std::string coord = "instance (level=" + std::to_string(inst.level) +
                                  ", distribution=" + inst.distribution +
                                  ", replicate=" + std::to_string(inst.replicate) + ")";
        try {
            sct::SupplyChainSolution sol = sct::solve_instance(config, gen.demand, all, solver);
            if (sol.status == milp::MilpStatus::Optimal) {
                for (int m : sol.open_facilities) inst.labels[static_cast<size_t>(m)] = 1;
                inst.has_objective = true;
                inst.objective = sol.objective;
                inst.status = "optimal";
                slot.keep = true;
            } else if (sol.status == milp::MilpStatus::Infeasible) {
                inst.labels.back() = 1;
                inst.status = "infeasible";
                slot.keep = true;
            } else {
                slot.warning = coord + " unresolved at solver limits; excluded";
            }
        } catch (const std::exception& e) {
            slot.warning = coord + " failed: " + e.what() + "; excluded";
        }
    };

    int worker_count = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (worker_count < 1) worker_count = 1;
    worker_count = std::min<int>(worker_count, static_cast<int>(instances.size()));
    if (worker_count == 1) {
        for (size_t i = 0; i < instances.size(); ++i) work(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < worker_count; ++w) {
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < instances.size(); i = next.fetch_add(1))
                    work(i);
            });
        }
        for (auto& t : pool) t.join();
    }

    for (auto& slot : slots) {
        if (slot.keep) ds.instances.push_back(std::move(slot.inst));
        if (!slot.warning.empty()) ds.warnings.push_back(std::move(slot.warning));
    }
    ds.validate();
    return ds;
}

SplitCounts split_dataset(LabeledDataset& dataset, double train_fraction, double test_fraction,
                          double validation_fraction, std::uint64_t seed) {
    if (std::abs(train_fraction + test_fraction + validation_fraction - 1.0) > 1e-9)
        fail("split fractions must sum to 1");
    if (train_fraction <= 0.0 || test_fraction < 0.0 || validation_fraction < 0.0)
        fail("split fractions must be nonnegative with a nonempty training share");
    const int n = dataset.size();
    if (n == 0) fail("cannot split an empty dataset");

    std::vector<int> order(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    std::mt19937_64 rng(seed);
    for (int i = n - 1; i > 0; --i) {  // Fisher-Yates with the canonical uniform
        const int j = static_cast<int>(uniform01(rng) * (i + 1));
        std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(std::min(j, i))]);
    }

    const int n_train = static_cast<int>(std::floor(train_fraction * n));
    const int n_test = static_cast<int>(std::floor(test_fraction * n));
    if (n_train < 1) fail("training split is empty");

    dataset.split.assign(static_cast<size_t>(n), Split::Validation);
    for (int i = 0; i < n_train; ++i) dataset.split[static_cast<size_t>(order[i])] = Split::Train;
    for (int i = n_train; i < n_train + n_test; ++i)
        dataset.split[static_cast<size_t>(order[i])] = Split::Test;

    SplitCounts counts;
    counts.label_names = dataset.label_names;
    counts.train_positives.assign(dataset.label_names.size(), 0);
    counts.test_positives.assign(dataset.label_names.size(), 0);
    counts.validation_positives.assign(dataset.label_names.size(), 0);
    dataset.train_feature_max = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& inst = dataset.instances[static_cast<size_t>(i)];
        std::vector<int>* bucket = nullptr;
        switch (dataset.split[static_cast<size_t>(i)]) {
            case Split::Train:
                ++counts.train;
                bucket = &counts.train_positives;
                for (double f : inst.features)
                    dataset.train_feature_max = std::max(dataset.train_feature_max, f);
                break;
            case Split::Test:
                ++counts.test;
                bucket = &counts.test_positives;
                break;
            case Split::Validation:
                ++counts.validation;
                bucket = &counts.validation_positives;
                break;
        }
        for (size_t j = 0; j < inst.labels.size(); ++j) (*bucket)[j] += inst.labels[j];
    }
    return counts;
}

std::string SplitCounts::to_text() const {
    std::ostringstream out;
    out << "split\tinstances";
    for (const auto& name : label_names) out << '\t' << name;
    out << '\n';
    auto row = [&](const char* name, int total, const std::vector<int>& pos) {
        out << name << '\t' << total;
        for (int v : pos) out << '\t' << v;
        out << '\n';
    };
    row("train", train, train_positives);
    row("test", test, test_positives);
    row("validation", validation, validation_positives);
    return out.str();
}

void save_dataset(const LabeledDataset& dataset, const std::string& path) {
    dataset.validate();
    std::ofstream out(path);
    if (!out) fail("cannot write '" + path + "'");
    out << "# mipred-dataset v1\n";
    out << "# feature_scale=" << format_real(dataset.feature_scale) << '\n';
    for (int d = 1; d <= dataset.feature_width; ++d) out << "day_" << d << ',';
    for (const auto& name : dataset.label_names) out << name << ',';
    out << "objective,status,level,distribution,replicate,seed\n";
    for (const auto& inst : dataset.instances) {
        for (double f : inst.features) out << format_real(f) << ',';
        for (int v : inst.labels) out << v << ',';
        if (inst.has_objective) out << format_real(inst.objective);
        out << ',' << inst.status << ',' << inst.level << ',' << inst.distribution << ','
            << inst.replicate << ',' << inst.seed << '\n';
    }
}

LabeledDataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "# mipred-dataset v1")
        fail("'" + path + "' is not a v1 dataset file");
    if (!std::getline(in, line) || line.rfind("# feature_scale=", 0) != 0)
        fail("missing feature_scale header in '" + path + "'");
    LabeledDataset ds;
    ds.feature_scale = std::stod(line.substr(16));

    if (!std::getline(in, line)) fail("missing column header in '" + path + "'");
    std::vector<std::string> columns;
    {
        std::istringstream head(line);
        std::string field;
        while (std::getline(head, field, ',')) columns.push_back(field);
    }
    size_t width = 0;
    while (width < columns.size() && columns[width] == "day_" + std::to_string(width + 1)) ++width;
    if (width == 0) fail("no day_* feature columns in '" + path + "'");
    ds.feature_width = static_cast<int>(width);
    size_t label_end = width;
    while (label_end < columns.size() && columns[label_end] != "objective") ++label_end;
    if (label_end == width || label_end == columns.size())
        fail("no label columns between features and objective in '" + path + "'");
    ds.label_names.assign(columns.begin() + static_cast<long>(width),
                          columns.begin() + static_cast<long>(label_end));
    const std::vector<std::string> tail = {"objective", "status", "level",
                                           "distribution", "replicate", "seed"};
    for (size_t i = 0; i < tail.size(); ++i) {
        if (label_end + i >= columns.size() || columns[label_end + i] != tail[i])
            fail("unexpected trailing columns in '" + path + "'");
    }
    if (columns.size() != label_end + tail.size()) fail("extra columns in '" + path + "'");

    int line_no = 3;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::istringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.push_back("");
        if (fields.size() != columns.size())
            fail("line " + std::to_string(line_no) + ": expected " +
                 std::to_string(columns.size()) + " fields, found " +
                 std::to_string(fields.size()));
        LabeledInstance inst;
        try {
            for (size_t j = 0; j < width; ++j) inst.features.push_back(std::stod(fields[j]));
            for (size_t j = width; j < label_end; ++j)
                inst.labels.push_back(std::stoi(fields[j]));
            const std::string& obj = fields[label_end];
            if (!obj.empty()) {
                inst.has_objective = true;
                inst.objective = std::stod(obj);
            }
            inst.status = fields[label_end + 1];
            inst.level = std::stoi(fields[label_end + 2]);
            inst.distribution = fields[label_end + 3];
            inst.replicate = std::stoi(fields[label_end + 4]);
            inst.seed = std::stoull(fields[label_end + 5]);
        } catch (const std::exception&) {
            fail("line " + std::to_string(line_no) + ": malformed field");
        }
        ds.instances.push_back(std::move(inst));
    }
    ds.validate();
    return ds;
}

}  // namespace mipred::datagen
