#include "reducer/reducer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "milp/branch_and_bound.hpp"

namespace mipred::reducer {

namespace {

std::string fmt(const char* pattern, double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), pattern, value);
    return buffer;
}

std::string status_name(milp::MilpStatus status) {
    switch (status) {
        case milp::MilpStatus::Optimal: return "optimal";
        case milp::MilpStatus::Infeasible: return "infeasible";
        case milp::MilpStatus::GapLimit: return "gap_limit";
        case milp::MilpStatus::NodeLimit: return "node_limit";
    }
    return "unknown";
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Solves one built model and fills the reduced-side report fields.
std::optional<sct::SupplyChainSolution> run_solve(const sct::SupplyChainConfig& config,
                                                  const sct::DemandProfile& instance,
                                                  const sct::BuiltModel& built,
                                                  const milp::SolverConfig& solver,
                                                  bool record_wall_time,
                                                  milp::MilpStatus& status_out,
                                                  double& wall_out) {
    const auto start = std::chrono::steady_clock::now();
    const milp::MilpSolution milp_solution = milp::solve_milp(built.problem, solver);
    if (record_wall_time) wall_out = elapsed_seconds(start);
    status_out = milp_solution.status;
    if (!milp_solution.has_incumbent) return std::nullopt;
    return sct::extract_solution(config, instance, built, milp_solution);
}

}  // namespace

ReductionMode parse_mode(const std::string& text) {
    if (text == "reduce") return ReductionMode::Reduce;
    if (text == "fix") return ReductionMode::Fix;
    throw std::invalid_argument("unknown reduction mode '" + text + "' (expected reduce or fix)");
}

std::string mode_name(ReductionMode mode) {
    return mode == ReductionMode::Reduce ? "reduce" : "fix";
}

std::string verdict_name(Verdict verdict) {
    switch (verdict) {
        case Verdict::Proceed: return "proceed";
        case Verdict::PredictedInfeasible: return "predicted_infeasible";
        case Verdict::EmptyPrediction: return "empty_prediction";
    }
    return "unknown";
}

std::string outcome_name(Outcome outcome) {
    switch (outcome) {
        case Outcome::NotCompared: return "not_compared";
        case Outcome::GlobalMatch: return "global_match";
        case Outcome::Suboptimal: return "suboptimal";
        case Outcome::Infeasible: return "infeasible";
        case Outcome::CorrectlySkipped: return "correctly_skipped";
    }
    return "unknown";
}

ReductionDecision threshold_reduce(const std::vector<double>& probabilities, double k_prob,
                                   ReductionMode mode) {
    if (probabilities.size() < 2) {
        throw std::invalid_argument(
            "threshold_reduce: need at least one facility probability plus the "
            "infeasibility class");
    }
    if (!(k_prob > 0.0) || !(k_prob < 1.0)) {
        throw std::invalid_argument("threshold_reduce: k_prob must lie strictly in (0, 1)");
    }
    for (double p : probabilities) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            throw std::invalid_argument("threshold_reduce: probabilities must lie in [0, 1]");
        }
    }

    ReductionDecision decision;
    decision.probabilities = probabilities;
    decision.k_prob = k_prob;
    decision.mode = mode;

    // The kept subset is defined purely by thresholding the facility classes,
    // which keeps it monotone in k_prob. The verdict below decides whether the
    // subset is acted on at all.
    for (size_t m = 0; m + 1 < probabilities.size(); ++m) {
        if (probabilities[m] >= k_prob) decision.facilities.push_back(static_cast<int>(m));
    }
    // The infeasibility class rules alone: when it clears the threshold no
    // model is built no matter how confident the facility classes are.
    if (probabilities.back() >= k_prob) {
        decision.verdict = Verdict::PredictedInfeasible;
        return decision;
    }
    if (decision.facilities.empty()) {
        decision.verdict = Verdict::EmptyPrediction;
        decision.warning =
            "no facility probability reached the threshold; treating the instance "
            "as predicted infeasible";
        return decision;
    }
    decision.verdict = Verdict::Proceed;
    return decision;
}

ReducedSolveResult solve_reduced(const ReductionDecision& decision,
                                 const sct::DemandProfile& instance,
                                 const sct::SupplyChainConfig& config,
                                 const milp::SolverConfig& solver, bool record_wall_time) {
    ReducedSolveResult result;
    result.report.decision = decision;
    if (decision.skip_solve()) {
        result.report.skipped = true;
        return result;
    }

    try {
        if (decision.mode == ReductionMode::Reduce) {
            const sct::BuiltModel full = sct::build_model(config, instance);
            result.report.full_stats = full.stats;
            const sct::BuiltModel reduced =
                sct::build_model(config, instance, decision.facilities);
            result.report.reduced_stats = reduced.stats;
            result.report.attempted = true;
            result.solution = run_solve(config, instance, reduced, solver, record_wall_time,
                                        result.report.reduced_status,
                                        result.report.reduced_wall_seconds);
        } else {
            // Fix mode keeps the full construction and pins every
            // establishment variable: one for kept facilities, zero otherwise.
            sct::BuiltModel built = sct::build_model(config, instance);
            result.report.full_stats = built.stats;
            result.report.reduced_stats = built.stats;
            std::vector<bool> keep(built.open_col.size(), false);
            for (int m : decision.facilities) keep[static_cast<size_t>(m)] = true;
            for (size_t m = 0; m < built.open_col.size(); ++m) {
                const int col = built.open_col[m];
                if (col < 0) continue;
                const double value = keep[m] ? 1.0 : 0.0;
                built.problem.variable(col).lower = value;
                built.problem.variable(col).upper = value;
                ++result.report.pinned_binaries;
            }
            result.report.attempted = true;
            result.solution = run_solve(config, instance, built, solver, record_wall_time,
                                        result.report.reduced_status,
                                        result.report.reduced_wall_seconds);
        }
    } catch (const std::exception& e) {
        throw std::runtime_error("reduced solve (" + std::to_string(instance.patients()) +
                                 " patients, " + mode_name(decision.mode) + " mode): " + e.what());
    }

    if (result.solution) {
        result.report.has_reduced_objective = true;
        result.report.reduced_objective = result.solution->objective;
    }
    const auto fraction = [](int reduced, int full) {
        return full > 0 ? 1.0 - static_cast<double>(reduced) / static_cast<double>(full) : 0.0;
    };
    result.report.constraint_reduction =
        fraction(result.report.reduced_stats.constraints, result.report.full_stats.constraints);
    result.report.binary_reduction =
        fraction(result.report.reduced_stats.binaries, result.report.full_stats.binaries);
    return result;
}

ReductionReport pipeline_solve(const nn::TrainedModel& model, const sct::DemandProfile& instance,
                               double k_prob, ReductionMode mode,
                               const sct::SupplyChainConfig& config,
                               const milp::SolverConfig& solver, const PipelineOptions& options) {
    // Stage 1: aggregate the demand and predict class probabilities.
    std::vector<double> probabilities;
    try {
        const int expected = config.facility_count() + 1;
        if (model.spec.output_width() != expected) {
            throw std::runtime_error("model predicts " +
                                     std::to_string(model.spec.output_width()) +
                                     " classes but the configuration has " +
                                     std::to_string(expected) +
                                     " (facilities plus infeasibility)");
        }
        const std::vector<double> totals = instance.daily_totals(model.spec.input_width);
        Eigen::MatrixXd features(1, model.spec.input_width);
        for (int i = 0; i < model.spec.input_width; ++i) features(0, i) = totals[static_cast<size_t>(i)];
        const Eigen::MatrixXd probs = nn::predict_probabilities(model, features);
        probabilities.assign(probs.data(), probs.data() + probs.size());
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("predict: ") + e.what());
    }

    // Stage 2: threshold into a facility subset.
    ReductionDecision decision;
    try {
        decision = threshold_reduce(probabilities, k_prob, mode);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("reduce: ") + e.what());
    }

    // Stage 3: solve the reduced model, optionally alongside the full one.
    try {
        ReducedSolveResult reduced =
            solve_reduced(decision, instance, config, solver, options.record_wall_time);
        ReductionReport report = std::move(reduced.report);
        if (!model.label_names.empty()) report.label_names = model.label_names;

        if (options.compare_full) {
            std::vector<int> all(static_cast<size_t>(config.facility_count()));
            for (size_t m = 0; m < all.size(); ++m) all[m] = static_cast<int>(m);
            const auto start = std::chrono::steady_clock::now();
            const sct::SupplyChainSolution full =
                sct::solve_instance(config, instance, all, solver);
            if (options.record_wall_time) report.full_wall_seconds = elapsed_seconds(start);
            report.full_solved = true;
            report.full_status = full.status;
            if (full.status == milp::MilpStatus::Optimal ||
                full.status == milp::MilpStatus::GapLimit) {
                report.has_full_objective = true;
                report.full_objective = full.objective;
            }

            if (report.skipped) {
                report.outcome = report.has_full_objective ? Outcome::Infeasible
                                                           : Outcome::CorrectlySkipped;
            } else if (report.has_reduced_objective && report.has_full_objective) {
                const double tol =
                    (solver.mipgap + 1e-9) * std::max(1.0, std::abs(report.full_objective));
                report.outcome = report.reduced_objective <= report.full_objective + tol
                                     ? Outcome::GlobalMatch
                                     : Outcome::Suboptimal;
            } else {
                // The reduced path failed to produce what the full model has,
                // or it spent a solve proving what a skip would have said.
                report.outcome = Outcome::Infeasible;
            }
        }
        return report;
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("solve: ") + e.what());
    }
}

std::string ReductionReport::to_text() const {
    std::ostringstream out;
    out << "== reduction report ==\n";
    out << "mode: " << mode_name(decision.mode) << "\n";
    out << "k_prob: " << fmt("%.6f", decision.k_prob) << "\n";
    out << "probabilities:";
    for (size_t i = 0; i < decision.probabilities.size(); ++i) {
        out << " ";
        if (i < label_names.size()) out << label_names[i] << "=";
        out << fmt("%.6f", decision.probabilities[i]);
    }
    out << "\n";
    out << "verdict: " << verdict_name(decision.verdict) << "\n";
    if (!decision.warning.empty()) out << "warning: " << decision.warning << "\n";
    if (decision.verdict == Verdict::Proceed) {
        out << "kept_facilities:";
        for (int m : decision.facilities) {
            out << " ";
            if (static_cast<size_t>(m) < label_names.size()) {
                out << label_names[static_cast<size_t>(m)];
            } else {
                out << "facility" << (m + 1);
            }
        }
        out << "\n";
    }

    if (skipped) {
        out << "reduced_model: skipped (no model built)\n";
    } else {
        out << "full_size: " << full_stats.constraints << " constraints, "
            << full_stats.binaries << " binaries, " << full_stats.variables << " variables\n";
        out << "reduced_size: " << reduced_stats.constraints << " constraints, "
            << reduced_stats.binaries << " binaries, " << reduced_stats.variables
            << " variables\n";
        if (pinned_binaries > 0) out << "pinned_binaries: " << pinned_binaries << "\n";
        out << "constraint_reduction: " << fmt("%.4f", constraint_reduction) << "\n";
        out << "binary_reduction: " << fmt("%.4f", binary_reduction) << "\n";
        out << "reduced_status: " << status_name(reduced_status) << "\n";
        if (has_reduced_objective) {
            out << "reduced_objective: " << fmt("%.6f", reduced_objective) << "\n";
        }
        out << "reduced_wall_seconds: " << fmt("%.3f", reduced_wall_seconds) << "\n";
    }

    if (full_solved) {
        out << "full_status: " << status_name(full_status) << "\n";
        if (has_full_objective) {
            out << "full_objective: " << fmt("%.6f", full_objective) << "\n";
        }
        out << "full_wall_seconds: " << fmt("%.3f", full_wall_seconds) << "\n";
        out << "outcome: " << outcome_name(outcome) << "\n";
    }
    return out.str();
}

std::string ReductionReport::summary_header() {
    return "instance\tverdict\treduced_status\treduced_objective\tfull_status\tfull_objective\t"
           "outcome\tconstraint_reduction\tbinary_reduction\treduced_wall_seconds\t"
           "full_wall_seconds";
}

std::string ReductionReport::summary_row(const std::string& instance_name) const {
    std::ostringstream out;
    out << instance_name << "\t" << verdict_name(decision.verdict) << "\t";
    out << (skipped ? "skipped" : status_name(reduced_status)) << "\t";
    out << (has_reduced_objective ? fmt("%.6f", reduced_objective) : "-") << "\t";
    out << (full_solved ? status_name(full_status) : "-") << "\t";
    out << (has_full_objective ? fmt("%.6f", full_objective) : "-") << "\t";
    out << outcome_name(outcome) << "\t";
    if (skipped) {
        out << "-\t-\t";
    } else {
        out << fmt("%.4f", constraint_reduction) << "\t" << fmt("%.4f", binary_reduction) << "\t";
    }
    out << fmt("%.3f", reduced_wall_seconds) << "\t" << fmt("%.3f", full_wall_seconds);
    return out.str();
}

}  // namespace mipred::reducer
