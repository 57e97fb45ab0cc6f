#pragma once

#include <string>
#include <vector>

#include "milp/problem.hpp"

namespace mipred::milp {

// Eliminated variable reconstructed as var = (r - a * with) / b, indices in
// the original problem's space. Records replay in reverse order.
struct Substitution {
    int var = -1;
    int with = -1;
    double a = 0.0;
    double b = 1.0;
    double r = 0.0;
};

struct PresolveResult {
    bool infeasible = false;
    std::string message;
    MilpProblem problem;                         // reduced problem, same optimum
    std::vector<std::pair<int, double>> fixed;   // original index -> constant
    std::vector<Substitution> substitutions;
    std::vector<int> kept;                       // reduced index -> original index
    int original_variable_count = 0;

    // Expands a solution of the reduced problem to the original variable
    // space (constants applied, substitutions replayed in reverse).
    std::vector<double> postsolve(const std::vector<double>& reduced_values) const;
};

// Iterated reductions until fixpoint:
//  - variables with equal bounds fold into constants,
//  - singleton rows fix a variable or tighten its bounds (binary bounds
//    snap to {0, 1}, e.g. a link v <= 0 with v >= 0 disabled by a
//    co-location rule fixes v = 0),
//  - rows whose bound activity already meets the rhs force their variables
//    to the corresponding bounds, redundant rows are dropped,
//  - two-variable equality rows eliminate one continuous variable by
//    substitution, folding its bounds onto the survivor.
// The reduced problem has the identical optimal objective; postsolve maps
// any of its solutions back.
PresolveResult presolve(const MilpProblem& problem);

}  // namespace mipred::milp
