#pragma once

#include <optional>
#include <string>
#include <vector>

#include "milp/problem.hpp"
#include "nn/train.hpp"
#include "sct/builder.hpp"
#include "sct/config.hpp"
#include "sct/solution.hpp"

namespace mipred::reducer {

enum class ReductionMode { Reduce, Fix };

enum class Verdict {
    Proceed,              // solve over the thresholded facility subset
    PredictedInfeasible,  // the infeasibility class cleared the threshold
    EmptyPrediction,      // no facility cleared the threshold; treated as
                          // predicted infeasible, flagged with a warning
};

ReductionMode parse_mode(const std::string& text);
std::string mode_name(ReductionMode mode);
std::string verdict_name(Verdict verdict);

struct ReductionDecision {
    std::vector<double> probabilities;  // per facility, then the infeasible class
    double k_prob = 0.5;
    ReductionMode mode = ReductionMode::Reduce;
    Verdict verdict = Verdict::Proceed;
    std::vector<int> facilities;  // kept subset, ascending; empty unless Proceed
    std::string warning;          // set for EmptyPrediction

    bool skip_solve() const { return verdict != Verdict::Proceed; }
};

// Thresholds class probabilities into a facility subset. The infeasibility
// class is checked first and on its own: when it clears k_prob no facility is
// kept no matter how confident the facility classes are. Otherwise every
// facility with probability >= k_prob is kept; if none clears the bar the
// decision degrades to EmptyPrediction rather than building a model that
// cannot open anything.
ReductionDecision threshold_reduce(const std::vector<double>& probabilities, double k_prob,
                                   ReductionMode mode = ReductionMode::Reduce);

enum class Outcome {
    NotCompared,       // full model not solved alongside
    GlobalMatch,       // reduced objective equals the full optimum
    Suboptimal,        // reduced solve finished but above the full optimum
    Infeasible,        // reduced path produced no solution although one exists,
                       // or it proceeded on an instance with no solution
    CorrectlySkipped,  // predicted infeasible and the full model agrees
};

std::string outcome_name(Outcome outcome);

struct ReductionReport {
    ReductionDecision decision;
    std::vector<std::string> label_names;  // class names for readable reports

    // Reduced side. `skipped` means no model was built at all.
    bool skipped = false;
    bool attempted = false;  // a reduced model was built and solved
    sct::ModelStats reduced_stats;
    milp::MilpStatus reduced_status = milp::MilpStatus::Infeasible;
    bool has_reduced_objective = false;
    double reduced_objective = 0.0;
    double reduced_wall_seconds = 0.0;
    int pinned_binaries = 0;  // establishment variables fixed in fix mode

    // Construction size of the unrestricted model (stats only; populated on
    // every proceeded instance so the reduction fractions are well defined).
    sct::ModelStats full_stats;
    double constraint_reduction = 0.0;  // 1 - reduced/full
    double binary_reduction = 0.0;

    // Full-model comparison (only when requested).
    bool full_solved = false;
    milp::MilpStatus full_status = milp::MilpStatus::Infeasible;
    bool has_full_objective = false;
    double full_objective = 0.0;
    double full_wall_seconds = 0.0;
    Outcome outcome = Outcome::NotCompared;

    // Structured per-instance report.
    std::string to_text() const;

    // One delimited row for the batch summary table.
    static std::string summary_header();
    std::string summary_row(const std::string& instance_name) const;
};

struct ReducedSolveResult {
    ReductionReport report;
    std::optional<sct::SupplyChainSolution> solution;
};

// Acts on a threshold decision: a skip verdict returns immediately without
// constructing anything; otherwise the model is built (restricted to the kept
// subset in reduce mode, full-size with pinned establishment variables in fix
// mode), solved, and reported honestly even when the reduced model turns out
// infeasible. Wall times are recorded only when `record_wall_time` is set so
// that reports are byte-stable across reruns.
ReducedSolveResult solve_reduced(const ReductionDecision& decision,
                                 const sct::DemandProfile& instance,
                                 const sct::SupplyChainConfig& config,
                                 const milp::SolverConfig& solver,
                                 bool record_wall_time = false);

struct PipelineOptions {
    bool compare_full = false;     // also solve the unrestricted model and classify
    bool record_wall_time = false; // leave wall fields zero for byte-stable reports
};

// Full prediction-to-solution pass for one instance: aggregate the demand into
// the classifier's feature window, predict class probabilities, threshold them,
// and solve the resulting reduced model. With `compare_full` the unrestricted
// model is solved as well and the outcome is classified. Errors are re-thrown
// tagged with the stage that failed (predict/reduce/solve).
ReductionReport pipeline_solve(const nn::TrainedModel& model, const sct::DemandProfile& instance,
                               double k_prob, ReductionMode mode,
                               const sct::SupplyChainConfig& config,
                               const milp::SolverConfig& solver,
                               const PipelineOptions& options = PipelineOptions{});

}  // namespace mipred::reducer
