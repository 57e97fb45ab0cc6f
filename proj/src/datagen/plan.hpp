#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sct/config.hpp"

namespace mipred::datagen {

enum class Distribution { Uniform, LeftTriangular, RightTriangular };

std::string distribution_name(Distribution d);
Distribution distribution_from_name(const std::string& name);

// Instance grid: levels are a rounded linear spread of patient counts, each
// crossed with every distribution and replicated; one derived seed per
// instance makes the whole set reproducible from the master seed.
struct GenerationPlan {
    int min_patients = 2;
    int max_patients = 6;
    int level_count = 10;
    int replicates = 5;
    std::vector<Distribution> distributions = {
        Distribution::Uniform, Distribution::LeftTriangular, Distribution::RightTriangular};
    int horizon = 90;
    std::uint64_t seed = 1;

    std::vector<int> levels() const;
    int instance_count() const;
    void validate() const;
};

struct InstanceMeta {
    int level = 0;
    Distribution distribution = Distribution::Uniform;
    int replicate = 1;  // 1-based
    std::uint64_t seed = 0;
};

struct GeneratedInstance {
    InstanceMeta meta;
    sct::DemandProfile demand;
};

// Draws one demand profile: arrival days by inverse-CDF over the day weights
// (uniform constant, left triangular decreasing from day 1, right triangular
// increasing to the last day), centers uniform. A draw landing on a full
// (center, day) cell is moved by a deterministic nearest-day scan (earlier
// day first, then later, then the next center). Throws when the request
// exceeds horizon × centers × cap.
sct::DemandProfile sample_demand_profile(int patients, Distribution distribution, int centers,
                                         int daily_cap, int horizon, std::mt19937_64& rng);

sct::DemandProfile sample_demand_profile(int patients, Distribution distribution,
                                         const sct::SupplyChainConfig& config,
                                         std::mt19937_64& rng);

// All profiles of the plan, ordered (level, distribution, replicate),
// deterministic under the plan seed. Sampler failures are rethrown with the
// instance coordinates attached.
std::vector<GeneratedInstance> generate_instance_set(const GenerationPlan& plan,
                                                     const sct::SupplyChainConfig& config);

}  // namespace mipred::datagen
