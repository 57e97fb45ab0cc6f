#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hpo/gp.hpp"
#include "hpo/space.hpp"

namespace mipred::hpo {

// One objective evaluation in a Bayesian-optimization run.
struct BoEvaluation {
    int iteration = 0;  // 1-based global evaluation index
    std::vector<double> theta;
    double accuracy = 0.0;
    double wall_seconds = 0.0;
    bool failed = false;
};

struct BoResult {
    std::vector<double> best_theta;
    double best_accuracy = 0.0;
    std::vector<BoEvaluation> history;
};

struct BoOptions {
    int initial_samples = 5;
    double kappa = 2.0;
    double observation_noise = 1e-6;
    // Off by default so runs of the same seed produce identical history files.
    bool record_wall_time = false;
};

using BoObjective = std::function<double(const std::vector<double>& theta)>;

// Maximizes mean + kappa*stddev of the surrogate posterior over the unit
// cube (1,024-point Sobol scan refined by multi-start pattern search) and
// returns the acquired point in native coordinates.
std::vector<double> acquire_ucb(const GpModel& model, const HyperSpace& space, double kappa);

// Bayesian optimization: `initial_samples` Sobol seeds, then `maxiter`
// acquire/evaluate/refit rounds — exactly initial_samples + maxiter objective
// calls. An objective that throws scores 0 for that point and the run
// continues. The incumbent keeps the first-found maximum on ties.
BoResult bo_run(const BoObjective& objective, const HyperSpace& space, int maxiter,
                std::uint64_t seed, const BoOptions& options = {});

// Appends history rows to a tab-separated file (header written when the file
// is new): iteration, one column per dimension, accuracy, wall seconds.
void append_history(const std::string& path, const HyperSpace& space,
                    const std::vector<BoEvaluation>& history);

}  // namespace mipred::hpo
