#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "datagen/plan.hpp"
#include "milp/problem.hpp"
#include "sct/config.hpp"

namespace mipred::datagen {

struct LabeledInstance {
    std::vector<double> features;  // daily arrival totals over the horizon
    std::vector<int> labels;       // one per facility, then the infeasible flag
    bool has_objective = false;
    double objective = 0.0;
    std::string status;  // "optimal" or "infeasible"
    int level = 0;
    std::string distribution;
    int replicate = 1;
    std::uint64_t seed = 0;
};

enum class Split { Train, Test, Validation };

struct SplitCounts {
    int train = 0, test = 0, validation = 0;
    // label-presence counts per split, one row per label
    std::vector<std::string> label_names;
    std::vector<int> train_positives, test_positives, validation_positives;
    std::string to_text() const;
};

struct LabeledDataset {
    std::vector<std::string> label_names;  // facilities then "infeasible"
    int feature_width = 90;
    double feature_scale = 1.0;  // fixed physical divisor used downstream
    std::vector<LabeledInstance> instances;
    std::vector<Split> split;              // parallel to instances; empty till split
    std::vector<std::string> warnings;     // unresolved-instance records, not persisted
    double train_feature_max = 0.0;        // audit statistic from the training split

    int size() const { return static_cast<int>(instances.size()); }
    std::vector<int> indices_of(Split s) const;
    void validate() const;
};

// Solves every profile with the full facility set and records labels from the
// incumbent's open set. Unresolved solves (node or time limits) are excluded
// with a warning entry instead of being guessed. Labeling runs on `threads`
// workers (0 = hardware count) and results keep instance order.
LabeledDataset label_instances(const std::vector<GeneratedInstance>& instances,
                               const sct::SupplyChainConfig& config,
                               const milp::SolverConfig& solver, int threads = 0);

// Deterministic permutation split; fractions must sum to 1 and train must be
// nonempty. Returns per-split instance and label-presence counts.
SplitCounts split_dataset(LabeledDataset& dataset, double train_fraction, double test_fraction,
                          double validation_fraction, std::uint64_t seed);

// Delimited text with a versioned comment header; lossless round-trip.
void save_dataset(const LabeledDataset& dataset, const std::string& path);
LabeledDataset load_dataset(const std::string& path);

}  // namespace mipred::datagen
