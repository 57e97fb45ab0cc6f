#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "nn/presets.hpp"
#include "reducer/reducer.hpp"
#include "sct/builder.hpp"
#include "sct/config.hpp"
#include "sct/solution.hpp"

using namespace mipred;

namespace {

sct::SupplyChainConfig desk_config() {
    return sct::SupplyChainConfig::from_json_file(std::string(MIPRED_DATA_DIR) +
                                                  "/desk_params.json");
}

sct::DemandProfile arrivals(std::vector<sct::Arrival> list, int horizon = 90) {
    sct::DemandProfile d;
    d.arrivals = std::move(list);
    d.horizon = horizon;
    return d;
}

milp::SolverConfig exact_solver() {
    milp::SolverConfig cfg;
    cfg.mipgap = 0.0;
    return cfg;
}

// Classifier stub with zero weights and logit(p) biases: predicts the same
// probability vector for every instance, which makes pipeline outcomes exact.
nn::TrainedModel constant_model(const std::vector<double>& probabilities) {
    nn::TrainedModel model;
    model.spec.input_width = 90;
    model.spec.layers = {nn::LayerSpec::dense(static_cast<int>(probabilities.size()))};
    model.spec.validate();
    model.params = nn::zero_parameters(model.spec);
    for (size_t i = 0; i < probabilities.size(); ++i) {
        const double p = probabilities[i];
        model.params[0].bias(static_cast<Eigen::Index>(i)) = std::log(p / (1.0 - p));
    }
    model.label_names = {"m1", "m2", "m3", "m4", "m5", "m6", "infeasible"};
    model.label_names.resize(probabilities.size());
    model.feature_scale = 16.0;
    return model;
}

const double kSpreadC1Objective = 1334760.0;   // two spread patients at c1, optimum {m1}
const double kSameDayObjective = 2603480.0;    // same-day c1+c2 pair, optimum {m1, m3}

}  // namespace

TEST_CASE("thresholding keeps exactly the classes that clear the bar") {
    const std::vector<double> probs = {0.9, 0.2, 0.1, 0.1, 0.1, 0.1, 0.05};
    const reducer::ReductionDecision d = reducer::threshold_reduce(probs, 0.5);
    CHECK(d.verdict == reducer::Verdict::Proceed);
    CHECK(d.facilities == std::vector<int>{0});
    CHECK_FALSE(d.skip_solve());
    CHECK(d.k_prob == 0.5);
    CHECK(d.mode == reducer::ReductionMode::Reduce);

    // Boundary membership is inclusive.
    const reducer::ReductionDecision at_bar =
        reducer::threshold_reduce({0.5, 0.49, 0.1, 0.1, 0.1, 0.1, 0.1}, 0.5);
    CHECK(at_bar.facilities == std::vector<int>{0});
}

TEST_CASE("a confident infeasibility class suppresses every facility") {
    const std::vector<double> probs = {0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.95};
    const reducer::ReductionDecision d = reducer::threshold_reduce(probs, 0.5);
    CHECK(d.verdict == reducer::Verdict::PredictedInfeasible);
    CHECK(d.skip_solve());
    // The thresholded subset is still recorded, but it is never acted on.
    CHECK(d.facilities == std::vector<int>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("an empty facility prediction degrades to a flagged skip") {
    const std::vector<double> probs = {0.1, 0.2, 0.1, 0.1, 0.1, 0.1, 0.3};
    const reducer::ReductionDecision d = reducer::threshold_reduce(probs, 0.5);
    CHECK(d.verdict == reducer::Verdict::EmptyPrediction);
    CHECK(d.facilities.empty());
    CHECK(d.skip_solve());
    CHECK(d.warning.find("threshold") != std::string::npos);
}

TEST_CASE("lower thresholds keep supersets of higher thresholds") {
    std::mt19937_64 rng(2026);
    auto u01 = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> probs(7);
        for (auto& p : probs) p = 0.001 + 0.998 * u01();
        double k1 = 0.001 + 0.998 * u01();
        double k2 = 0.001 + 0.998 * u01();
        if (k1 > k2) std::swap(k1, k2);
        const auto low = reducer::threshold_reduce(probs, k1);
        const auto high = reducer::threshold_reduce(probs, k2);
        for (int m : high.facilities) {
            CHECK(std::find(low.facilities.begin(), low.facilities.end(), m) !=
                  low.facilities.end());
        }
    }
}

TEST_CASE("thresholding rejects malformed inputs") {
    CHECK_THROWS_WITH(reducer::threshold_reduce({0.5}, 0.5), doctest::Contains("at least one"));
    CHECK_THROWS_WITH(reducer::threshold_reduce({0.5, 0.5}, 0.0), doctest::Contains("(0, 1)"));
    CHECK_THROWS_WITH(reducer::threshold_reduce({0.5, 0.5}, 1.0), doctest::Contains("(0, 1)"));
    CHECK_THROWS_WITH(reducer::threshold_reduce({1.5, 0.5}, 0.5), doctest::Contains("[0, 1]"));
    CHECK(reducer::parse_mode("reduce") == reducer::ReductionMode::Reduce);
    CHECK(reducer::parse_mode("fix") == reducer::ReductionMode::Fix);
    CHECK_THROWS_WITH(reducer::parse_mode("prune"), doctest::Contains("unknown reduction mode"));
}

TEST_CASE("a predicted-infeasible decision never builds a model") {
    const sct::SupplyChainConfig cfg = desk_config();
    const sct::DemandProfile d = arrivals({{0, 1}, {0, 30}});
    const reducer::ReductionDecision decision =
        reducer::threshold_reduce({0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.95}, 0.5);
    const long before = sct::build_invocations();
    const reducer::ReducedSolveResult got =
        reducer::solve_reduced(decision, d, cfg, exact_solver());
    CHECK(sct::build_invocations() == before);
    CHECK(got.report.skipped);
    CHECK_FALSE(got.report.attempted);
    CHECK_FALSE(got.solution.has_value());
    CHECK(got.report.to_text().find("skipped") != std::string::npos);

    // The flagged empty prediction takes the same no-build path.
    const reducer::ReductionDecision empty =
        reducer::threshold_reduce({0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1}, 0.5);
    const reducer::ReducedSolveResult got2 =
        reducer::solve_reduced(empty, d, cfg, exact_solver());
    CHECK(sct::build_invocations() == before);
    CHECK(got2.report.skipped);
}

TEST_CASE("keeping every facility reproduces the full optimum exactly") {
    const sct::SupplyChainConfig cfg = desk_config();
    const std::vector<std::pair<sct::DemandProfile, double>> fixtures = {
        {arrivals({{0, 1}, {0, 30}}), kSpreadC1Objective},
        {arrivals({{1, 10}, {1, 60}}), 1352300.0},
        {arrivals({{0, 15}, {1, 15}}), kSameDayObjective},
    };
    reducer::ReductionDecision keep_all;
    keep_all.verdict = reducer::Verdict::Proceed;
    keep_all.facilities = {0, 1, 2, 3, 4, 5};
    for (const auto& [demand, want] : fixtures) {
        const reducer::ReducedSolveResult got =
            reducer::solve_reduced(keep_all, demand, cfg, exact_solver());
        REQUIRE(got.report.has_reduced_objective);
        CHECK(got.report.reduced_objective == doctest::Approx(want).epsilon(1e-9));
        CHECK(got.report.constraint_reduction == 0.0);
        CHECK(got.report.binary_reduction == 0.0);
        CHECK(got.report.reduced_stats.constraints == got.report.full_stats.constraints);
    }
}

TEST_CASE("supersets of the optimal facilities lose nothing") {
    const sct::SupplyChainConfig cfg = desk_config();
    const sct::DemandProfile d = arrivals({{0, 1}, {0, 30}});  // optimum opens {m1}
    reducer::ReductionDecision decision;
    decision.verdict = reducer::Verdict::Proceed;
    decision.facilities = {0, 2, 3};
    const reducer::ReducedSolveResult got =
        reducer::solve_reduced(decision, d, cfg, exact_solver());
    REQUIRE(got.report.has_reduced_objective);
    CHECK(got.report.reduced_objective == doctest::Approx(kSpreadC1Objective).epsilon(1e-9));
    CHECK(got.report.reduced_status == milp::MilpStatus::Optimal);
    // Dropping half the sites must shrink the construction.
    CHECK(got.report.constraint_reduction > 0.0);
    CHECK(got.report.binary_reduction > 0.0);
    CHECK(got.report.reduced_stats.constraints < got.report.full_stats.constraints);
    CHECK(got.report.reduced_stats.binaries < got.report.full_stats.binaries);
    // The solver still picks the true optimum within the superset.
    REQUIRE(got.solution.has_value());
    CHECK(got.solution->open_facilities == std::vector<int>{0});
}

TEST_CASE("restricting away the optimum is reported honestly") {
    const sct::SupplyChainConfig cfg = desk_config();

    // Worse-but-feasible: force the expensive remote facility for c1 demand.
    const sct::DemandProfile spread = arrivals({{0, 1}, {0, 30}});
    reducer::ReductionDecision remote;
    remote.verdict = reducer::Verdict::Proceed;
    remote.facilities = {2};
    const reducer::ReducedSolveResult worse =
        reducer::solve_reduced(remote, spread, cfg, exact_solver());
    REQUIRE(worse.report.has_reduced_objective);
    CHECK(worse.report.reduced_objective > kSpreadC1Objective + 1000.0);

    // Infeasible: same-day patients at both centers cannot share one line.
    const sct::DemandProfile same_day = arrivals({{0, 15}, {1, 15}});
    reducer::ReductionDecision single;
    single.verdict = reducer::Verdict::Proceed;
    single.facilities = {0};
    const reducer::ReducedSolveResult infeasible =
        reducer::solve_reduced(single, same_day, cfg, exact_solver());
    CHECK(infeasible.report.attempted);
    CHECK_FALSE(infeasible.report.has_reduced_objective);
    CHECK(infeasible.report.reduced_status == milp::MilpStatus::Infeasible);
    CHECK_FALSE(infeasible.solution.has_value());

    // Restriction can never beat the unrestricted optimum.
    for (const std::vector<int>& subset :
         {std::vector<int>{1}, std::vector<int>{3}, std::vector<int>{0, 5}}) {
        reducer::ReductionDecision decision;
        decision.verdict = reducer::Verdict::Proceed;
        decision.facilities = subset;
        const reducer::ReducedSolveResult got =
            reducer::solve_reduced(decision, spread, cfg, exact_solver());
        if (got.report.has_reduced_objective) {
            CHECK(got.report.reduced_objective >= kSpreadC1Objective - 1e-6);
        }
    }
}

TEST_CASE("fix mode pins establishment variables instead of shrinking the model") {
    const sct::SupplyChainConfig cfg = desk_config();
    const sct::DemandProfile d = arrivals({{0, 1}, {0, 30}});

    // Perfect prediction: fixing exactly the optimal set matches reduce mode.
    reducer::ReductionDecision exact_fix;
    exact_fix.verdict = reducer::Verdict::Proceed;
    exact_fix.mode = reducer::ReductionMode::Fix;
    exact_fix.facilities = {0};
    const reducer::ReducedSolveResult fixed =
        reducer::solve_reduced(exact_fix, d, cfg, exact_solver());
    REQUIRE(fixed.report.has_reduced_objective);
    CHECK(fixed.report.reduced_objective == doctest::Approx(kSpreadC1Objective).epsilon(1e-9));
    CHECK(fixed.report.pinned_binaries == 6);
    CHECK(fixed.report.reduced_stats.constraints == fixed.report.full_stats.constraints);
    CHECK(fixed.report.constraint_reduction == 0.0);

    // Fixing a superset forces the extra site open and costs strictly more;
    // reduce mode on the same subset re-optimizes and stays at the optimum.
    reducer::ReductionDecision superset_fix;
    superset_fix.verdict = reducer::Verdict::Proceed;
    superset_fix.mode = reducer::ReductionMode::Fix;
    superset_fix.facilities = {0, 2};
    const reducer::ReducedSolveResult forced =
        reducer::solve_reduced(superset_fix, d, cfg, exact_solver());
    REQUIRE(forced.report.has_reduced_objective);
    CHECK(forced.report.reduced_objective > kSpreadC1Objective + 1000.0);

    reducer::ReductionDecision superset_reduce = superset_fix;
    superset_reduce.mode = reducer::ReductionMode::Reduce;
    const reducer::ReducedSolveResult reopt =
        reducer::solve_reduced(superset_reduce, d, cfg, exact_solver());
    REQUIRE(reopt.report.has_reduced_objective);
    CHECK(reopt.report.reduced_objective == doctest::Approx(kSpreadC1Objective).epsilon(1e-9));
}

TEST_CASE("the pipeline classifies outcomes against the full model") {
    const sct::SupplyChainConfig cfg = desk_config();
    reducer::PipelineOptions compare;
    compare.compare_full = true;

    // Confident correct prediction: keeps {m1, m3}, matches the optimum.
    const nn::TrainedModel good = constant_model({0.9, 0.05, 0.8, 0.05, 0.05, 0.05, 0.02});
    const sct::DemandProfile same_day = arrivals({{0, 15}, {1, 15}});
    const reducer::ReductionReport matched = reducer::pipeline_solve(
        good, same_day, 0.5, reducer::ReductionMode::Reduce, cfg, exact_solver(), compare);
    CHECK(matched.outcome == reducer::Outcome::GlobalMatch);
    CHECK(matched.has_reduced_objective);
    CHECK(matched.reduced_objective == doctest::Approx(kSameDayObjective).epsilon(1e-9));
    CHECK(matched.full_objective == doctest::Approx(kSameDayObjective).epsilon(1e-9));
    CHECK(matched.constraint_reduction > 0.0);
    CHECK(matched.binary_reduction > 0.0);
    CHECK(matched.reduced_wall_seconds == 0.0);  // timing off by default
    CHECK(matched.full_wall_seconds == 0.0);
    CHECK(matched.to_text().find("outcome: global_match") != std::string::npos);

    // Overconfident narrow prediction: reduced model is infeasible, full is not.
    const nn::TrainedModel narrow = constant_model({0.9, 0.05, 0.05, 0.05, 0.05, 0.05, 0.02});
    const reducer::ReductionReport broke = reducer::pipeline_solve(
        narrow, same_day, 0.5, reducer::ReductionMode::Reduce, cfg, exact_solver(), compare);
    CHECK(broke.outcome == reducer::Outcome::Infeasible);
    CHECK(broke.attempted);
    CHECK_FALSE(broke.has_reduced_objective);
    CHECK(broke.has_full_objective);

    // Expensive facility only: solved, but above the optimum.
    const nn::TrainedModel pricey = constant_model({0.05, 0.05, 0.9, 0.05, 0.05, 0.05, 0.02});
    const sct::DemandProfile spread = arrivals({{0, 1}, {0, 30}});
    const reducer::ReductionReport costly = reducer::pipeline_solve(
        pricey, spread, 0.5, reducer::ReductionMode::Reduce, cfg, exact_solver(), compare);
    CHECK(costly.outcome == reducer::Outcome::Suboptimal);
    CHECK(costly.reduced_objective > costly.full_objective);

    // Correct skip: predicted infeasible on a truly infeasible instance.
    const nn::TrainedModel doomsayer = constant_model({0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.9});
    const sct::DemandProfile crowd = arrivals({{0, 20}, {0, 20}, {0, 20}, {1, 20}, {1, 20}});
    const reducer::ReductionReport skipped = reducer::pipeline_solve(
        doomsayer, crowd, 0.5, reducer::ReductionMode::Reduce, cfg, exact_solver(), compare);
    CHECK(skipped.outcome == reducer::Outcome::CorrectlySkipped);
    CHECK(skipped.skipped);

    // Wrong skip: predicted infeasible although the instance has an optimum.
    const reducer::ReductionReport missed = reducer::pipeline_solve(
        doomsayer, spread, 0.5, reducer::ReductionMode::Reduce, cfg, exact_solver(), compare);
    CHECK(missed.outcome == reducer::Outcome::Infeasible);
    CHECK(missed.skipped);
    CHECK(missed.has_full_objective);

    // Summary rows carry the same verdicts.
    CHECK(reducer::ReductionReport::summary_header().substr(0, 8) == "instance");
    const std::string row = matched.summary_row("fixture_a");
    CHECK(row.find("fixture_a\tproceed\toptimal") == 0);
    CHECK(missed.summary_row("b").find("predicted_infeasible\tskipped\t-") != std::string::npos);
}

TEST_CASE("pipeline stages tag their failures") {
    const sct::SupplyChainConfig cfg = desk_config();
    const sct::DemandProfile d = arrivals({{0, 1}});

    // Class-count mismatch is caught before any solving.
    const nn::TrainedModel wrong_classes = constant_model({0.5, 0.5, 0.5});
    CHECK_THROWS_WITH(reducer::pipeline_solve(wrong_classes, d, 0.5,
                                              reducer::ReductionMode::Reduce, cfg,
                                              exact_solver()),
                      doctest::Contains("predict:"));

    // Bad threshold is a reduce-stage error.
    const nn::TrainedModel ok = constant_model({0.9, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1});
    CHECK_THROWS_WITH(reducer::pipeline_solve(ok, d, -0.5, reducer::ReductionMode::Reduce, cfg,
                                              exact_solver()),
                      doctest::Contains("reduce:"));

    // An arrival outside the feature window is a predict-stage error.
    const sct::DemandProfile far = arrivals({{0, 200}}, 250);
    CHECK_THROWS_WITH(reducer::pipeline_solve(ok, far, 0.5, reducer::ReductionMode::Reduce, cfg,
                                              exact_solver()),
                      doctest::Contains("predict:"));
}

TEST_CASE("pipeline reports are byte-stable across reruns") {
    const sct::SupplyChainConfig cfg = desk_config();
    const sct::DemandProfile d = arrivals({{0, 15}, {1, 15}});
    const nn::TrainedModel model = constant_model({0.9, 0.05, 0.8, 0.05, 0.05, 0.05, 0.02});
    reducer::PipelineOptions compare;
    compare.compare_full = true;
    const reducer::ReductionReport a = reducer::pipeline_solve(
        model, d, 0.5, reducer::ReductionMode::Reduce, cfg, exact_solver(), compare);
    const reducer::ReductionReport b = reducer::pipeline_solve(
        model, d, 0.5, reducer::ReductionMode::Reduce, cfg, exact_solver(), compare);
    CHECK(a.to_text() == b.to_text());
    CHECK(a.summary_row("x") == b.summary_row("x"));

    // Requesting timings fills the wall fields (the only nondeterministic part).
    reducer::PipelineOptions timed = compare;
    timed.record_wall_time = true;
    const reducer::ReductionReport c = reducer::pipeline_solve(
        model, d, 0.5, reducer::ReductionMode::Reduce, cfg, exact_solver(), timed);
    CHECK(c.reduced_wall_seconds > 0.0);
    CHECK(c.full_wall_seconds > 0.0);
}
