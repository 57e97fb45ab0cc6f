#pragma once

#include <Eigen/Dense>

#include "milp/problem.hpp"

namespace mipred::milp {

// Equality standard form min cost.x, A x = b, lo <= x <= up built from a
// MilpProblem with integrality relaxed. One slack column per row; rows are
// sign-flipped where needed so the crash basis starts at nonnegative
// residuals. Maximization is handled by negating the cost vector.
struct StandardForm {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> A;  // m x ns
    Eigen::VectorXd b;
    Eigen::VectorXd cost;   // structural costs, minimize
    Eigen::VectorXd lo;     // structural bounds
    Eigen::VectorXd up;
    std::vector<Relation> rel;
    double constant = 0.0;
    bool maximize = false;
};

StandardForm build_standard_form(const MilpProblem& problem);

struct SimplexOutcome {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;  // cost.x of the structural columns, no constant
    Eigen::VectorXd x;       // structural values
    long iterations = 0;
};

// Bounded-variable primal simplex on a dense tableau. Phase 1 minimizes the
// sum of artificial variables from a slack crash basis; phase 2 optimizes the
// true cost. Dantzig pricing switches to Bland's rule permanently once the
// objective stalls, which guarantees termination; exceeding the hard
// iteration cap throws (numeric breakdown beyond the anti-cycling safeguard).
SimplexOutcome solve_standard_form(const StandardForm& form, const Eigen::VectorXd& lo,
                                   const Eigen::VectorXd& up, const SolverConfig& config);

// Solves the continuous relaxation of the problem as given (binary variables
// are treated as continuous within their bounds).
LpSolution solve_lp(const MilpProblem& problem, const SolverConfig& config = SolverConfig{});

}  // namespace mipred::milp
