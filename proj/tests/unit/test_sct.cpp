#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "milp/branch_and_bound.hpp"
#include "milp/lp_writer.hpp"
#include "oracles/sct_oracles.hpp"
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

// Two-mode variant: slow cheap road, fast dear air.
sct::SupplyChainConfig two_mode_config() {
    sct::SupplyChainConfig cfg = desk_config();
    cfg.modes.push_back({"air", 1, 1});
    for (auto& plane : cfg.leg1_unit_cost) {
        for (auto& row : plane) row.push_back(row.front() * 5.0);
    }
    for (auto& plane : cfg.leg2_unit_cost) {
        for (auto& row : plane) row.push_back(row.front() * 5.0);
    }
    cfg.validate();
    return cfg;
}

}  // namespace

TEST_CASE("desk parameters load, validate, and round-trip") {
    sct::SupplyChainConfig cfg = desk_config();
    CHECK(cfg.facility_count() == 6);
    CHECK(cfg.center_count() == 2);
    CHECK(cfg.mode_count() == 1);
    CHECK(cfg.processing_days() == 9);
    CHECK(cfg.min_route_days() == 14);
    CHECK(cfg.max_route_days() == 14);

    const std::string copy = "desk_roundtrip.json";
    cfg.to_json_file(copy);
    sct::SupplyChainConfig back = sct::SupplyChainConfig::from_json_file(copy);
    CHECK(back.facilities[1].lines == 2);
    CHECK(back.leg1_unit_cost[1][2][0] == doctest::Approx(340.0));
    CHECK(back.max_turnaround_days == 21);
    std::remove(copy.c_str());
}

TEST_CASE("config validation rejects broken inputs") {
    sct::SupplyChainConfig cfg = desk_config();
    SUBCASE("duplicate entity name") {
        cfg.facilities[1].name = "m1";
        CHECK_THROWS(cfg.validate());
    }
    SUBCASE("hospital paired with two centers") {
        cfg.centers[1].hospital = "h1";
        CHECK_THROWS(cfg.validate());
    }
    SUBCASE("turnaround limit below the fastest route") {
        cfg.max_turnaround_days = 13;
        CHECK_THROWS(cfg.validate());
    }
    SUBCASE("cost tensor dimension mismatch") {
        cfg.leg1_unit_cost[0].pop_back();
        CHECK_THROWS(cfg.validate());
    }
    SUBCASE("opening budget larger than the network") {
        cfg.max_facilities = 7;
        CHECK_THROWS(cfg.validate());
    }
}

TEST_CASE("demand profiles validate and round-trip through files") {
    sct::SupplyChainConfig cfg = desk_config();
    sct::DemandProfile d = arrivals({{0, 3}, {1, 41}, {0, 90}});
    d.validate(cfg);

    const std::string path = "demand_roundtrip.csv";
    d.save(path, cfg);
    sct::DemandProfile back = sct::DemandProfile::load(path, cfg);
    REQUIRE(back.patients() == 3);
    CHECK(back.horizon == 90);
    CHECK(back.arrivals[1].center == 1);
    CHECK(back.arrivals[2].day == 90);
    std::remove(path.c_str());

    sct::DemandProfile bad = arrivals({{0, 91}});
    CHECK_THROWS(bad.validate(cfg));
    sct::DemandProfile none = arrivals({});
    CHECK_THROWS(none.validate(cfg));

    std::vector<double> totals = d.daily_totals();
    CHECK(totals.size() == 90);
    CHECK(totals[2] == doctest::Approx(1.0));
    CHECK(totals[40] == doctest::Approx(1.0));
    CHECK(totals[89] == doctest::Approx(1.0));
}

TEST_CASE("single-patient model has the hand-counted shape") {
    sct::SupplyChainConfig cfg = desk_config();
    sct::DemandProfile d = arrivals({{0, 1}});
    sct::BuiltModel built = sct::build_model(cfg, d, {0, 1});
    CHECK(built.stats.variables == 42);
    CHECK(built.stats.binaries == 16);
    CHECK(built.stats.constraints == 59);
    CHECK(built.stats.variables == built.problem.variable_count());
    CHECK(built.stats.constraints == built.problem.constraint_count());
    CHECK(built.stats.binaries == built.problem.binary_count());
    CHECK(built.horizon == 104);

    // Routing days: check-in 1, depart 2, arrive 4, leave 13, deliver 15.
    REQUIRE(built.leg1[0].size() == 2);
    CHECK(built.leg1[0][0].depart_day == 2);
    CHECK(built.leg1[0][0].arrive_day == 4);
    REQUIRE(built.leg2[0].size() == 4);
    CHECK(built.leg2[0][0].depart_day == 13);
    CHECK(built.leg2[0][0].deliver_day == 15);
}

TEST_CASE("builder guards reject degenerate requests") {
    sct::SupplyChainConfig cfg = desk_config();
    sct::DemandProfile d = arrivals({{0, 5}});
    CHECK_THROWS_WITH(sct::build_model(cfg, d, {}),
                      doctest::Contains("no facilities selected"));
    CHECK_THROWS(sct::build_model(cfg, d, {9}));

    cfg.time_periods = 10;
    CHECK_THROWS_WITH(sct::build_model(cfg, d, {0}),
                      doctest::Contains("planning horizon too short"));
}

TEST_CASE("build invocation counter advances once per build") {
    sct::SupplyChainConfig cfg = desk_config();
    sct::DemandProfile d = arrivals({{0, 5}});
    const long before = sct::build_invocations();
    sct::build_model(cfg, d);
    sct::build_model(cfg, d, {2});
    CHECK(sct::build_invocations() == before + 2);
}

TEST_CASE("two spread patients near center c1 open only facility m1") {
    sct::SupplyChainConfig cfg = desk_config();
    sct::DemandProfile d = arrivals({{0, 1}, {0, 30}});
    sct::SupplyChainSolution sol = sct::solve_instance(cfg, d, {0, 1, 2, 3, 4, 5}, exact_solver());
    REQUIRE(sol.status == milp::MilpStatus::Optimal);
    CHECK(sol.open_facilities == std::vector<int>{0});
    CHECK(sol.objective == doctest::Approx(1334760.0).epsilon(1e-9));
    REQUIRE(sol.routes.size() == 2);
    for (const auto& r : sol.routes) {
        CHECK(r.facility == 0);
        CHECK(r.hospital == r.center);
        CHECK(r.turnaround_days == 14);
        CHECK(r.processing_days == 9);
    }
    CHECK(sol.facilities[0].peak_in_process == 1);
    CHECK(sol.average_turnaround == doctest::Approx(14.0));
}

TEST_CASE("two spread patients near center c2 prefer facility m3") {
    sct::SupplyChainConfig cfg = desk_config();
    sct::DemandProfile d = arrivals({{1, 10}, {1, 60}});
    sct::SupplyChainSolution sol = sct::solve_instance(cfg, d, {0, 1, 2, 3, 4, 5}, exact_solver());
    REQUIRE(sol.status == milp::MilpStatus::Optimal);
    CHECK(sol.open_facilities == std::vector<int>{2});
    // 1268600 + 2*38400 + 2*1300 + 2*2150 material/transport/release economics.
    CHECK(sol.objective == doctest::Approx(1352300.0).epsilon(1e-9));
}

TEST_CASE("same-day patients at both centers force a second site") {
    sct::SupplyChainConfig cfg = desk_config();
    sct::DemandProfile d = arrivals({{0, 15}, {1, 15}});
    sct::SupplyChainSolution sol = sct::solve_instance(cfg, d, {0, 1, 2, 3, 4, 5}, exact_solver());
    REQUIRE(sol.status == milp::MilpStatus::Optimal);
    CHECK(sol.open_facilities == std::vector<int>{0, 2});
    CHECK(sol.objective == doctest::Approx(2603480.0).epsilon(1e-9));
    for (const auto& f : sol.facilities) {
        if (f.open) CHECK(f.peak_in_process == 1);
    }
}

TEST_CASE("five same-day patients exceed every two-site line budget") {
    sct::SupplyChainConfig cfg = desk_config();
    sct::DemandProfile d = arrivals({{0, 20}, {0, 20}, {0, 20}, {1, 20}, {1, 20}});
    sct::BuiltModel built = sct::build_model(cfg, d);
    milp::MilpSolution got = milp::solve_milp(built.problem, exact_solver());
    CHECK(got.status == milp::MilpStatus::Infeasible);
    CHECK_FALSE(got.has_incumbent);
}

TEST_CASE("full solves match the facility-subset enumeration oracle") {
    sct::SupplyChainConfig cfg = desk_config();
    const std::vector<sct::DemandProfile> fixtures = {
        arrivals({{0, 1}, {0, 30}}),
        arrivals({{1, 5}, {1, 50}, {0, 50}}),
        arrivals({{0, 8}, {1, 8}, {0, 40}}),
        arrivals({{0, 12}, {0, 12}, {1, 12}}),
    };
    for (const auto& d : fixtures) {
        CAPTURE(d.patients());
        oracles::SubsetScan ref = oracles::best_subset_by_enumeration(cfg, d, exact_solver());
        sct::SupplyChainSolution sol =
            sct::solve_instance(cfg, d, {0, 1, 2, 3, 4, 5}, exact_solver());
        REQUIRE(ref.feasible);
        REQUIRE(sol.status == milp::MilpStatus::Optimal);
        CHECK(sol.objective ==
              doctest::Approx(ref.objective).epsilon(1e-9));
        CHECK(sol.open_facilities == ref.support);
    }
}

TEST_CASE("restricting the model to the optimal support keeps the optimum") {
    sct::SupplyChainConfig cfg = desk_config();
    sct::DemandProfile d = arrivals({{0, 8}, {1, 8}, {0, 40}});
    sct::SupplyChainSolution full = sct::solve_instance(cfg, d, {0, 1, 2, 3, 4, 5}, exact_solver());
    REQUIRE(full.status == milp::MilpStatus::Optimal);
    sct::SupplyChainSolution reduced =
        sct::solve_instance(cfg, d, full.open_facilities, exact_solver());
    REQUIRE(reduced.status == milp::MilpStatus::Optimal);
    CHECK(reduced.objective == doctest::Approx(full.objective).epsilon(1e-9));
    CHECK(reduced.open_facilities == full.open_facilities);

    sct::BuiltModel small = sct::build_model(cfg, d, full.open_facilities);
    sct::BuiltModel big = sct::build_model(cfg, d);
    CHECK(small.stats.variables < big.stats.variables);
    CHECK(small.stats.constraints < big.stats.constraints);
    CHECK(small.stats.binaries < big.stats.binaries);
}

TEST_CASE("growing the allowed facility set never worsens the optimum") {
    sct::SupplyChainConfig cfg = desk_config();
    sct::DemandProfile d = arrivals({{0, 3}, {1, 3}});
    const std::vector<std::vector<int>> nests = {
        {1}, {1, 2}, {0, 1, 2}, {0, 1, 2, 4}, {0, 1, 2, 3, 4, 5}};
    double prev = milp::kInf;
    for (const auto& active : nests) {
        sct::SupplyChainSolution sol = sct::solve_instance(cfg, d, active, exact_solver());
        REQUIRE(sol.status == milp::MilpStatus::Optimal);
        CHECK(sol.objective <= prev + 1e-7 * std::max(1.0, std::abs(prev)));
        prev = sol.objective;
    }
}

TEST_CASE("tight turnaround limits force the fast transport mode") {
    sct::SupplyChainConfig cfg = two_mode_config();
    sct::DemandProfile d = arrivals({{0, 7}});

    // Road is cheaper, so a loose limit picks it.
    sct::SupplyChainSolution loose = sct::solve_instance(cfg, d, {0}, exact_solver());
    REQUIRE(loose.status == milp::MilpStatus::Optimal);
    CHECK(loose.routes[0].leg1_mode == 0);
    CHECK(loose.routes[0].leg2_mode == 0);
    CHECK(loose.routes[0].turnaround_days == 14);

    // Fastest possible route: 1 collection + 1 air + 9 processing + 1 air.
    cfg.max_turnaround_days = 12;
    sct::SupplyChainSolution tight = sct::solve_instance(cfg, d, {0}, exact_solver());
    REQUIRE(tight.status == milp::MilpStatus::Optimal);
    CHECK(tight.routes[0].leg1_mode == 1);
    CHECK(tight.routes[0].leg2_mode == 1);
    CHECK(tight.routes[0].turnaround_days == 12);
    CHECK(tight.objective > loose.objective);
}

TEST_CASE("one staggered day dodges the line-capacity clash") {
    sct::SupplyChainConfig cfg = desk_config();
    // Nine-day processing windows: arrivals 8 days apart still clash, 9 do not.
    sct::DemandProfile clash = arrivals({{0, 10}, {0, 18}});
    sct::SupplyChainSolution both = sct::solve_instance(cfg, clash, {0, 1, 2, 3, 4, 5}, exact_solver());
    REQUIRE(both.status == milp::MilpStatus::Optimal);
    CHECK(both.open_facilities.size() == 2);

    sct::DemandProfile clear = arrivals({{0, 10}, {0, 19}});
    sct::SupplyChainSolution one = sct::solve_instance(cfg, clear, {0, 1, 2, 3, 4, 5}, exact_solver());
    REQUIRE(one.status == milp::MilpStatus::Optimal);
    CHECK(one.open_facilities == std::vector<int>{0});
}

TEST_CASE("supply chain models export as valid LP text") {
    sct::SupplyChainConfig cfg = desk_config();
    sct::DemandProfile d = arrivals({{0, 2}, {1, 7}});
    sct::BuiltModel built = sct::build_model(cfg, d);
    std::ostringstream out;
    milp::write_lp(built.problem, out);
    const std::string text = out.str();
    CHECK(text.find("open_m1") != std::string::npos);
    CHECK(text.find("open_budget:") != std::string::npos);
    CHECK(text.find("Binaries") != std::string::npos);
}
