#include "hpo/bo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "hpo/sobol.hpp"
#include "util/rng.hpp"

namespace mipred::hpo {

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("bayesian optimization: " + msg);
}

double ucb_score(const GpModel& model, const Eigen::VectorXd& u, double kappa) {
    const auto [mean, stddev] = gp_posterior(model, u);
    return mean + kappa * stddev;
}

// Greedy coordinate pattern search from `start`, clamped to the unit cube.
Eigen::VectorXd refine_unit(const GpModel& model, double kappa, Eigen::VectorXd start) {
    double best = ucb_score(model, start, kappa);
    double step = 0.05;
    while (step >= 1e-4) {
        bool improved = false;
        for (Eigen::Index d = 0; d < start.size(); ++d) {
            for (double direction : {+1.0, -1.0}) {
                Eigen::VectorXd candidate = start;
                candidate(d) = std::clamp(candidate(d) + direction * step, 0.0, 1.0);
                const double score = ucb_score(model, candidate, kappa);
                if (score > best) {
                    best = score;
                    start = candidate;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return start;
}

Eigen::VectorXd acquire_unit(const GpModel& model, int dim, double kappa) {
    const auto scan = sobol_points(dim, 1024);
    // Rank the scan and keep a handful of starts for local refinement.
    std::vector<std::pair<double, int>> ranked;
    ranked.reserve(scan.size());
    for (size_t i = 0; i < scan.size(); ++i) {
        Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(scan[i].data(), dim);
        ranked.emplace_back(ucb_score(model, u, kappa), static_cast<int>(i));
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    Eigen::VectorXd best_point;
    double best_score = -std::numeric_limits<double>::infinity();
    const int starts = std::min<int>(5, static_cast<int>(ranked.size()));
    for (int s = 0; s < starts; ++s) {
        Eigen::VectorXd u =
            Eigen::Map<const Eigen::VectorXd>(scan[static_cast<size_t>(ranked[s].second)].data(),
                                              dim);
        const Eigen::VectorXd refined = refine_unit(model, kappa, u);
        const double score = ucb_score(model, refined, kappa);
        if (score > best_score) {
            best_score = score;
            best_point = refined;
        }
    }
    return best_point;
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::vector<double> acquire_ucb(const GpModel& model, const HyperSpace& space, double kappa) {
    space.validate();
    if (model.dimension() != space.size()) fail("surrogate and space dimensions differ");
    const Eigen::VectorXd u = acquire_unit(model, space.size(), kappa);
    return space.from_unit(std::vector<double>(u.data(), u.data() + u.size()));
}

BoResult bo_run(const BoObjective& objective, const HyperSpace& space, int maxiter,
                std::uint64_t seed, const BoOptions& options) {
    space.validate();
    if (!objective) fail("no objective given");
    if (maxiter < 0) fail("maxiter must be non-negative");
    if (options.initial_samples < 2) fail("at least 2 initial samples required");
    const int dim = space.size();
    std::mt19937_64 tie_rng(seed);

    BoResult result;
    result.best_accuracy = -std::numeric_limits<double>::infinity();

    auto already_evaluated = [&](const std::vector<double>& theta) {
        for (const BoEvaluation& e : result.history) {
            if (e.theta == theta) return true;
        }
        return false;
    };

    // Rounding integer dimensions can collapse distinct unit points onto one
    // grid point; move such duplicates to the nearest unevaluated neighbor on
    // the integer lattice so the surrogate never sees two copies of a row.
    auto displace_duplicate = [&](std::vector<double> theta) {
        if (!already_evaluated(theta)) return theta;
        for (int ring = 1; ring <= 3; ++ring) {
            std::vector<std::pair<double, std::vector<double>>> candidates;
            for (size_t i = 0; i < space.dims.size(); ++i) {
                const HyperDimension& d = space.dims[i];
                if (d.kind != DimensionKind::Integer) continue;
                for (double delta : {-static_cast<double>(ring), static_cast<double>(ring)}) {
                    std::vector<double> moved = theta;
                    moved[i] += delta;
                    if (moved[i] < std::ceil(d.lower) || moved[i] > std::floor(d.upper)) continue;
                    if (already_evaluated(moved)) continue;
                    const std::vector<double> u_orig = space.to_unit(theta);
                    const std::vector<double> u_moved = space.to_unit(moved);
                    double dist2 = 0.0;
                    for (int k = 0; k < dim; ++k) {
                        dist2 += (u_orig[static_cast<size_t>(k)] -
                                  u_moved[static_cast<size_t>(k)]) *
                                 (u_orig[static_cast<size_t>(k)] -
                                  u_moved[static_cast<size_t>(k)]);
                    }
                    candidates.emplace_back(dist2, std::move(moved));
                }
            }
            if (candidates.empty()) continue;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : candidates) best = std::min(best, c.first);
            std::vector<const std::vector<double>*> nearest;
            for (const auto& c : candidates) {
                if (c.first == best) nearest.push_back(&c.second);
            }
            const size_t pick =
                nearest.size() == 1
                    ? 0
                    : static_cast<size_t>(util::uniform01(tie_rng) *
                                          static_cast<double>(nearest.size()));
            return *nearest[std::min(pick, nearest.size() - 1)];
        }
        return theta;  // lattice exhausted; accept the duplicate
    };

    auto evaluate = [&](std::vector<double> theta) {
        BoEvaluation entry;
        entry.iteration = static_cast<int>(result.history.size()) + 1;
        entry.theta = std::move(theta);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            entry.accuracy = objective(entry.theta);
            if (!std::isfinite(entry.accuracy)) {
                entry.accuracy = 0.0;
                entry.failed = true;
            }
        } catch (const std::exception&) {
            entry.accuracy = 0.0;
            entry.failed = true;
        }
        if (options.record_wall_time) {
            entry.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        if (entry.accuracy > result.best_accuracy) {
            result.best_accuracy = entry.accuracy;
            result.best_theta = entry.theta;
        }
        result.history.push_back(entry);
    };

    for (const auto& u : sobol_points(dim, options.initial_samples)) {
        evaluate(displace_duplicate(space.from_unit(u)));
    }

    for (int iter = 0; iter < maxiter; ++iter) {
        Eigen::MatrixXd inputs(static_cast<Eigen::Index>(result.history.size()), dim);
        Eigen::VectorXd targets(static_cast<Eigen::Index>(result.history.size()));
        for (size_t i = 0; i < result.history.size(); ++i) {
            const std::vector<double> u = space.to_unit(result.history[i].theta);
            for (int d = 0; d < dim; ++d) {
                inputs(static_cast<Eigen::Index>(i), d) = u[static_cast<size_t>(d)];
            }
            targets(static_cast<Eigen::Index>(i)) = result.history[i].accuracy;
        }
        const GpModel surrogate = gp_fit(inputs, targets, options.observation_noise);
        evaluate(displace_duplicate(acquire_ucb(surrogate, space, options.kappa)));
    }
    return result;
}

void append_history(const std::string& path, const HyperSpace& space,
                    const std::vector<BoEvaluation>& history) {
    space.validate();
    bool need_header = true;
    {
        std::ifstream probe(path);
        if (probe && probe.peek() != std::ifstream::traits_type::eof()) need_header = false;
    }
    std::ofstream out(path, std::ios::app);
    if (!out) fail("cannot write history file '" + path + "'");
    if (need_header) {
        out << "iteration";
        for (const HyperDimension& d : space.dims) out << "\t" << d.name;
        out << "\taccuracy\twall_seconds\n";
    }
    for (const BoEvaluation& e : history) {
        if (static_cast<int>(e.theta.size()) != space.size())
            fail("history row does not match the space dimension");
        out << e.iteration;
        for (double v : e.theta) out << "\t" << format_real(v);
        out << "\t" << format_real(e.accuracy) << "\t" << format_real(e.wall_seconds) << "\n";
    }
    if (!out) fail("failed while writing history file '" + path + "'");
}

}  // namespace mipred::hpo
