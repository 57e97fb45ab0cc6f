#include "datagen/plan.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "util/rng.hpp"

namespace mipred::datagen {

namespace {

using util::splitmix64;
using util::uniform01;

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("instance generation: " + msg);
}

}  // namespace

std::string distribution_name(Distribution d) {
    switch (d) {
        case Distribution::Uniform: return "uniform";
        case Distribution::LeftTriangular: return "left_triangular";
        case Distribution::RightTriangular: return "right_triangular";
    }
    fail("unknown distribution enum");
}

Distribution distribution_from_name(const std::string& name) {
    if (name == "uniform") return Distribution::Uniform;
    if (name == "left_triangular") return Distribution::LeftTriangular;
    if (name == "right_triangular") return Distribution::RightTriangular;
    fail("unknown distribution '" + name + "'");
}

std::vector<int> GenerationPlan::levels() const {
    std::vector<int> out;
    if (level_count == 1) {
        out.push_back(min_patients);
        return out;
    }
    for (int i = 0; i < level_count; ++i) {
        const double v = min_patients + static_cast<double>(i) * (max_patients - min_patients) /
                                            (level_count - 1);
        out.push_back(static_cast<int>(std::lround(v)));
    }
    return out;
}

int GenerationPlan::instance_count() const {
    return level_count * static_cast<int>(distributions.size()) * replicates;
}

void GenerationPlan::validate() const {
    if (min_patients < 1) fail("plan needs at least one patient per instance");
    if (max_patients < min_patients) fail("plan level range is empty");
    if (level_count < 1) fail("plan needs at least one level");
    if (replicates < 1) fail("plan needs at least one replicate");
    if (distributions.empty()) fail("plan needs at least one distribution");
    if (horizon < 1) fail("plan horizon must be positive");
}

sct::DemandProfile sample_demand_profile(int patients, Distribution distribution, int centers,
                                         int daily_cap, int horizon, std::mt19937_64& rng) {
    if (patients < 1) fail("need at least one patient");
    if (centers < 1 || daily_cap < 1 || horizon < 1) fail("degenerate sampling space");
    const long capacity = static_cast<long>(horizon) * centers * daily_cap;
    if (patients > capacity)
        fail("cannot place " + std::to_string(patients) + " patients into " +
             std::to_string(capacity) + " (center, day) slots");

    // Inverse-CDF table over days 1..horizon.
    std::vector<double> cdf(static_cast<size_t>(horizon));
    double total = 0.0;
    for (int t = 1; t <= horizon; ++t) {
        double w = 1.0;
        if (distribution == Distribution::LeftTriangular) w = static_cast<double>(horizon + 1 - t);
        if (distribution == Distribution::RightTriangular) w = static_cast<double>(t);
        total += w;
        cdf[static_cast<size_t>(t - 1)] = total;
    }
    for (double& v : cdf) v /= total;

    std::vector<std::vector<int>> used(static_cast<size_t>(centers),
                                       std::vector<int>(static_cast<size_t>(horizon), 0));
    // Nearest free day at one center: the drawn day, then earlier, then later.
    auto free_day_at = [&](int cc, int t) -> int {
        const auto& col = used[static_cast<size_t>(cc)];
        if (col[static_cast<size_t>(t - 1)] < daily_cap) return t;
        for (int off = 1; off < horizon; ++off) {
            if (t - off >= 1 && col[static_cast<size_t>(t - off - 1)] < daily_cap) return t - off;
            if (t + off <= horizon && col[static_cast<size_t>(t + off - 1)] < daily_cap)
                return t + off;
        }
        return 0;
    };
    auto place = [&](int c, int t) -> std::pair<int, int> {
        for (int hop = 0; hop < centers; ++hop) {
            const int cc = (c + hop) % centers;
            const int day = free_day_at(cc, t);
            if (day > 0) {
                used[static_cast<size_t>(cc)][static_cast<size_t>(day - 1)] += 1;
                return {cc, day};
            }
        }
        fail("no capacity left anywhere");  // unreachable behind the precondition
    };

    sct::DemandProfile d;
    d.horizon = horizon;
    for (int p = 0; p < patients; ++p) {
        const double u = uniform01(rng);
        const int day = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), u) -
                                         cdf.begin()) + 1;
        const int center = std::min(centers - 1, static_cast<int>(uniform01(rng) * centers));
        const auto [c, t] = place(center, std::min(day, horizon));
        d.arrivals.push_back({c, t});
    }
    return d;
}

sct::DemandProfile sample_demand_profile(int patients, Distribution distribution,
                                         const sct::SupplyChainConfig& config,
                                         std::mt19937_64& rng) {
    return sample_demand_profile(patients, distribution, config.center_count(),
                                 config.daily_center_cap, 90, rng);
}

std::vector<GeneratedInstance> generate_instance_set(const GenerationPlan& plan,
                                                     const sct::SupplyChainConfig& config) {
    plan.validate();
    std::vector<GeneratedInstance> out;
    out.reserve(static_cast<size_t>(plan.instance_count()));
    std::uint64_t seed_state = plan.seed;
    for (int level : plan.levels()) {
        for (Distribution dist : plan.distributions) {
            for (int rep = 1; rep <= plan.replicates; ++rep) {
                GeneratedInstance inst;
                inst.meta.level = level;
                inst.meta.distribution = dist;
                inst.meta.replicate = rep;
                inst.meta.seed = splitmix64(seed_state);
                std::mt19937_64 rng(inst.meta.seed);
                try {
                    inst.demand = sample_demand_profile(level, dist, config.center_count(),
                                                        config.daily_center_cap, plan.horizon, rng);
                } catch (const std::exception& e) {
                    fail("instance (level=" + std::to_string(level) + ", distribution=" +
                         distribution_name(dist) + ", replicate=" + std::to_string(rep) +
                         "): " + e.what());
                }
                out.push_back(std::move(inst));
            }
        }
    }
    return out;
}

}  // namespace mipred::datagen
