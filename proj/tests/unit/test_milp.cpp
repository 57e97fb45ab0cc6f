#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "milp/branch_and_bound.hpp"
#include "milp/lp_writer.hpp"
#include "milp/presolve.hpp"
#include "milp/problem.hpp"
#include "milp/simplex.hpp"
#include "oracles/lp_oracles.hpp"

using namespace mipred;
using milp::MilpProblem;
using milp::Relation;
using milp::Sense;
using milp::VarKind;

namespace {

// Box-bounded random LP; roughly two thirds are feasible by construction.
MilpProblem random_lp(std::mt19937_64& rng, int max_vars = 6, int max_rows = 6) {
    std::uniform_int_distribution<int> nv(2, max_vars);
    std::uniform_int_distribution<int> nr(1, max_rows);
    std::uniform_int_distribution<int> coef(-5, 5);
    std::uniform_int_distribution<int> rel_pick(0, 2);
    std::uniform_real_distribution<double> shift(-4.0, 4.0);
    const int n = nv(rng);
    const int m = nr(rng);
    MilpProblem p;
    for (int j = 0; j < n; ++j)
        p.add_variable("x" + std::to_string(j), -3.0, 3.0, VarKind::Continuous);
    std::vector<std::pair<int, double>> obj;
    for (int j = 0; j < n; ++j) obj.emplace_back(j, static_cast<double>(coef(rng)));
    p.set_objective(rng() % 2 ? Sense::Minimize : Sense::Maximize, obj, shift(rng));
    for (int i = 0; i < m; ++i) {
        std::vector<std::pair<int, double>> terms;
        for (int j = 0; j < n; ++j) {
            const int c = coef(rng);
            if (c != 0) terms.emplace_back(j, static_cast<double>(c));
        }
        if (terms.empty()) terms.emplace_back(0, 1.0);
        const int which = rel_pick(rng);
        const Relation rel = which == 0   ? Relation::GreaterEqual
                             : which == 1 ? Relation::Equal
                                          : Relation::LessEqual;
        p.add_constraint("c" + std::to_string(i), terms, rel, shift(rng));
    }
    return p;
}

MilpProblem random_milp(std::mt19937_64& rng, int max_bin = 12, int max_cont = 4) {
    std::uniform_int_distribution<int> nb(1, max_bin);
    std::uniform_int_distribution<int> nc(0, max_cont);
    std::uniform_int_distribution<int> nr(1, 8);
    std::uniform_int_distribution<int> coef(-5, 5);
    std::uniform_real_distribution<double> shift(-6.0, 10.0);
    const int kb = nb(rng);
    const int kc = nc(rng);
    MilpProblem p;
    for (int j = 0; j < kb; ++j)
        p.add_variable("b" + std::to_string(j), 0.0, 1.0, VarKind::Binary);
    for (int j = 0; j < kc; ++j)
        p.add_variable("x" + std::to_string(j), -2.0, 4.0, VarKind::Continuous);
    std::vector<std::pair<int, double>> obj;
    for (int j = 0; j < kb + kc; ++j) obj.emplace_back(j, static_cast<double>(coef(rng)));
    p.set_objective(rng() % 2 ? Sense::Minimize : Sense::Maximize, obj);
    const int m = nr(rng);
    for (int i = 0; i < m; ++i) {
        std::vector<std::pair<int, double>> terms;
        for (int j = 0; j < kb + kc; ++j) {
            const int c = coef(rng);
            if (c != 0) terms.emplace_back(j, static_cast<double>(c));
        }
        if (terms.empty()) terms.emplace_back(0, 1.0);
        const int r = static_cast<int>(rng() % 3);
        const Relation rel = r == 0 ? Relation::GreaterEqual
                             : r == 1 ? Relation::Equal
                                      : Relation::LessEqual;
        p.add_constraint("c" + std::to_string(i), terms, rel, shift(rng));
    }
    return p;
}

}  // namespace

TEST_CASE("problem rejects malformed input") {
    MilpProblem p;
    p.add_variable("x", 0.0, 1.0, VarKind::Continuous);
    CHECK_THROWS(p.add_variable("x", 0.0, 1.0, VarKind::Continuous));  // duplicate
    CHECK_THROWS(p.add_variable("y", 2.0, 1.0, VarKind::Continuous));  // crossed bounds
    CHECK_THROWS(p.add_variable("z", -0.5, 1.0, VarKind::Binary));     // binary outside [0,1]
    CHECK_THROWS(p.add_constraint("c", {{3, 1.0}}, Relation::LessEqual, 0.0));
    CHECK_THROWS(p.add_constraint("c", {{0, std::nan("")}}, Relation::LessEqual, 0.0));
}

TEST_CASE("simplex solves a textbook LP") {
    // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
    MilpProblem p;
    int x = p.add_variable("x", 0.0, milp::kInf, VarKind::Continuous);
    int y = p.add_variable("y", 0.0, milp::kInf, VarKind::Continuous);
    p.add_constraint("c1", {{x, 1.0}}, Relation::LessEqual, 4.0);
    p.add_constraint("c2", {{y, 2.0}}, Relation::LessEqual, 12.0);
    p.add_constraint("c3", {{x, 3.0}, {y, 2.0}}, Relation::LessEqual, 18.0);
    p.set_objective(Sense::Maximize, {{x, 3.0}, {y, 5.0}});
    auto sol = milp::solve_lp(p);
    REQUIRE(sol.status == milp::LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(36.0));
    CHECK(sol.values[0] == doctest::Approx(2.0));
    CHECK(sol.values[1] == doctest::Approx(6.0));
}

TEST_CASE("simplex detects infeasible and unbounded LPs") {
    MilpProblem inf;
    int x = inf.add_variable("x", 0.0, 10.0, VarKind::Continuous);
    inf.add_constraint("lo", {{x, 1.0}}, Relation::GreaterEqual, 5.0);
    inf.add_constraint("hi", {{x, 1.0}}, Relation::LessEqual, 3.0);
    inf.set_objective(Sense::Minimize, {{x, 1.0}});
    CHECK(milp::solve_lp(inf).status == milp::LpStatus::Infeasible);

    MilpProblem unb;
    int y = unb.add_variable("y", 0.0, milp::kInf, VarKind::Continuous);
    unb.add_constraint("c", {{y, -1.0}}, Relation::LessEqual, 0.0);
    unb.set_objective(Sense::Maximize, {{y, 1.0}});
    CHECK(milp::solve_lp(unb).status == milp::LpStatus::Unbounded);
}

TEST_CASE("simplex honors variable bounds without constraints") {
    MilpProblem p;
    int x = p.add_variable("x", -1.5, 2.5, VarKind::Continuous);
    int y = p.add_variable("y", -4.0, -1.0, VarKind::Continuous);
    p.set_objective(Sense::Minimize, {{x, 1.0}, {y, -2.0}});
    auto sol = milp::solve_lp(p);
    REQUIRE(sol.status == milp::LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(-1.5 + 2.0));
    CHECK(sol.values[0] == doctest::Approx(-1.5));
    CHECK(sol.values[1] == doctest::Approx(-1.0));
}

TEST_CASE("simplex survives a classically degenerate LP") {
    // Beale's cycling example; Bland's rule must terminate it.
    MilpProblem p;
    int x1 = p.add_variable("x1", 0.0, milp::kInf, VarKind::Continuous);
    int x2 = p.add_variable("x2", 0.0, milp::kInf, VarKind::Continuous);
    int x3 = p.add_variable("x3", 0.0, milp::kInf, VarKind::Continuous);
    int x4 = p.add_variable("x4", 0.0, milp::kInf, VarKind::Continuous);
    p.add_constraint("r1", {{x1, 0.25}, {x2, -8.0}, {x3, -1.0}, {x4, 9.0}},
                     Relation::LessEqual, 0.0);
    p.add_constraint("r2", {{x1, 0.5}, {x2, -12.0}, {x3, -0.5}, {x4, 3.0}},
                     Relation::LessEqual, 0.0);
    p.add_constraint("r3", {{x3, 1.0}}, Relation::LessEqual, 1.0);
    p.set_objective(Sense::Minimize,
                    {{x1, -0.75}, {x2, 150.0}, {x3, -0.02}, {x4, 6.0}});
    auto sol = milp::solve_lp(p);
    REQUIRE(sol.status == milp::LpStatus::Optimal);
    auto oracle = oracles::vertex_enum_lp(p);
    REQUIRE(oracle.feasible);
    CHECK(sol.objective == doctest::Approx(oracle.objective).epsilon(1e-9));
    CHECK(sol.objective == doctest::Approx(-0.77));
}

TEST_CASE("random LPs agree with the vertex-enumeration oracle") {
    std::mt19937_64 rng(20260815);
    int feasible_seen = 0, infeasible_seen = 0;
    for (int trial = 0; trial < 200; ++trial) {
        MilpProblem p = random_lp(rng);
        auto oracle = oracles::vertex_enum_lp(p);
        auto sol = milp::solve_lp(p);
        CAPTURE(trial);
        if (oracle.feasible) {
            ++feasible_seen;
            REQUIRE(sol.status == milp::LpStatus::Optimal);
            CHECK(sol.objective ==
                  doctest::Approx(oracle.objective).epsilon(1e-6).scale(1.0));
        } else {
            ++infeasible_seen;
            REQUIRE(sol.status == milp::LpStatus::Infeasible);
        }
    }
    CHECK(feasible_seen > 50);
    CHECK(infeasible_seen > 10);
}

TEST_CASE("random MILPs agree with the exhaustive-enumeration oracle") {
    std::mt19937_64 rng(987654321);
    milp::SolverConfig cfg;
    cfg.mipgap = 0.0;
    int feasible_seen = 0;
    for (int trial = 0; trial < 60; ++trial) {
        MilpProblem p = random_milp(rng, 10, 3);
        auto oracle = oracles::binary_enum_milp(p, cfg);
        auto sol = milp::solve_milp(p, cfg);
        CAPTURE(trial);
        if (oracle.feasible) {
            ++feasible_seen;
            REQUIRE(sol.status == milp::MilpStatus::Optimal);
            CHECK(sol.objective ==
                  doctest::Approx(oracle.objective).epsilon(1e-9).scale(1.0));
            CHECK(sol.best_bound <=
                  sol.objective + 1e-9 * std::max(1.0, std::abs(sol.objective)));
        } else {
            REQUIRE(sol.status == milp::MilpStatus::Infeasible);
        }
    }
    CHECK(feasible_seen > 20);
}

TEST_CASE("branch and bound respects the node limit") {
    std::mt19937_64 rng(44);
    MilpProblem p = random_milp(rng, 12, 2);
    milp::SolverConfig cfg;
    cfg.node_limit = 1;
    auto sol = milp::solve_milp(p, cfg);
    CHECK(sol.nodes_explored <= 1);
    if (sol.status != milp::MilpStatus::Infeasible)
        CHECK((sol.status == milp::MilpStatus::NodeLimit ||
               sol.status == milp::MilpStatus::Optimal));
}

TEST_CASE("solve_milp is deterministic") {
    std::mt19937_64 rng(777);
    MilpProblem p = random_milp(rng, 12, 4);
    auto a = milp::solve_milp(p);
    auto b = milp::solve_milp(p);
    CHECK(a.status == b.status);
    CHECK(a.objective == b.objective);
    CHECK(a.nodes_explored == b.nodes_explored);
    CHECK(a.values == b.values);
}

TEST_CASE("presolve fixes singletons and forcing rows") {
    MilpProblem p;
    int a = p.add_variable("a", 0.0, 10.0, VarKind::Continuous);
    int b = p.add_variable("b", 0.0, 1.0, VarKind::Binary);
    int c = p.add_variable("c", 0.0, 5.0, VarKind::Continuous);
    int d = p.add_variable("d", 0.0, 5.0, VarKind::Continuous);
    p.add_constraint("pin_a", {{a, 2.0}}, Relation::Equal, 6.0);
    p.add_constraint("kill_b", {{b, 1.0}}, Relation::LessEqual, 0.0);
    p.add_constraint("force_cd", {{c, 1.0}, {d, 1.0}}, Relation::LessEqual, 0.0);
    p.set_objective(Sense::Minimize, {{a, 1.0}, {b, 5.0}, {c, 1.0}, {d, 1.0}});
    auto res = milp::presolve(p);
    REQUIRE(!res.infeasible);
    CHECK(res.problem.variable_count() == 0);
    CHECK(res.problem.objective_constant() == doctest::Approx(3.0));
    auto full = res.postsolve({});
    CHECK(full[0] == doctest::Approx(3.0));
    CHECK(full[1] == 0.0);
    CHECK(full[2] == 0.0);
    CHECK(full[3] == 0.0);
}

TEST_CASE("presolve substitution preserves the optimum") {
    // y is chained to x through an equality; eliminating it must not change
    // the optimal objective, and postsolve must reconstruct y.
    MilpProblem p;
    int x = p.add_variable("x", 0.0, 4.0, VarKind::Continuous);
    int y = p.add_variable("y", 0.0, 10.0, VarKind::Continuous);
    int z = p.add_variable("z", 0.0, 1.0, VarKind::Binary);
    p.add_constraint("link", {{x, 1.0}, {y, -1.0}}, Relation::Equal, -1.0);  // y = x + 1
    p.add_constraint("mix", {{y, 1.0}, {z, 2.0}}, Relation::GreaterEqual, 3.0);
    p.set_objective(Sense::Minimize, {{x, 1.0}, {y, 1.0}, {z, 0.5}});
    auto res = milp::presolve(p);
    REQUIRE(!res.infeasible);
    CHECK(res.problem.variable_count() < 3);
    auto direct = milp::solve_milp(p);
    REQUIRE(direct.status == milp::MilpStatus::Optimal);
    // x=0, y=1, z=1: objective 1.5 beats x=1, y=2 at 3.
    CHECK(direct.objective == doctest::Approx(1.5));
    CHECK(p.value_of(direct.values, "y") ==
          doctest::Approx(p.value_of(direct.values, "x") + 1.0));
}

TEST_CASE("presolve detects infeasibility from crossed bounds") {
    MilpProblem p;
    int x = p.add_variable("x", 0.0, 2.0, VarKind::Continuous);
    p.add_constraint("lo", {{x, 1.0}}, Relation::GreaterEqual, 1.5);
    p.add_constraint("hi", {{x, 1.0}}, Relation::LessEqual, 1.0);
    p.set_objective(Sense::Minimize, {{x, 1.0}});
    auto res = milp::presolve(p);
    CHECK(res.infeasible);
}

TEST_CASE("presolved random MILPs keep their optimum") {
    std::mt19937_64 rng(5150);
    milp::SolverConfig cfg;
    cfg.mipgap = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
        MilpProblem p = random_milp(rng, 8, 3);
        auto res = milp::presolve(p);
        CAPTURE(trial);
        auto direct = oracles::binary_enum_milp(p, cfg);
        if (res.infeasible) {
            CHECK(!direct.feasible);
            continue;
        }
        auto reduced = oracles::binary_enum_milp(res.problem, cfg);
        CHECK(direct.feasible == reduced.feasible);
        if (direct.feasible)
            CHECK(reduced.objective ==
                  doctest::Approx(direct.objective).epsilon(1e-7).scale(1.0));
    }
}

TEST_CASE("LP writer emits a parseable file and flags collisions") {
    MilpProblem p;
    int x = p.add_variable("x", 0.0, 4.0, VarKind::Continuous);
    int y = p.add_variable("y", -milp::kInf, milp::kInf, VarKind::Continuous);
    int b = p.add_variable("open[1]", 0.0, 1.0, VarKind::Binary);
    p.add_constraint("cap", {{x, 1.0}, {y, -2.5}, {b, 3.0}}, Relation::LessEqual, 7.0);
    p.add_constraint("eq", {{y, 1.0}}, Relation::Equal, 1.0);
    p.set_objective(Sense::Minimize, {{x, 1.0}, {b, 2.0}}, 4.0);
    std::ostringstream out;
    milp::write_lp(p, out);
    const std::string text = out.str();
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find("cap: x - 2.5 y + 3 open[1] <= 7") != std::string::npos);
    CHECK(text.find("y free") != std::string::npos);
    CHECK(text.find("Binaries") != std::string::npos);
    CHECK(text.find("End") != std::string::npos);

    MilpProblem bad;
    bad.add_variable("1x", 0.0, 1.0, VarKind::Continuous);
    bad.set_objective(Sense::Minimize, {});
    std::ostringstream sink;
    CHECK_THROWS(milp::write_lp(bad, sink));
}

TEST_CASE("dense ceiling rejects oversized problems") {
    MilpProblem p;
    for (int j = 0; j < milp::kDenseColCeiling + 1; ++j)
        p.add_variable("v" + std::to_string(j), 0.0, 1.0, VarKind::Continuous);
    p.set_objective(Sense::Minimize, {{0, 1.0}});
    CHECK_THROWS(milp::solve_lp(p));
}
