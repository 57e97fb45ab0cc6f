#pragma once

#include "milp/problem.hpp"

namespace mipred::milp {

// Best-bound branch and bound over the binary variables, run on the
// presolved problem. Branching picks the most fractional binary (lowest
// index on ties); node selection is best bound with FIFO on ties, so runs
// are deterministic. Incumbents found through an integral relaxation are
// re-solved with the binaries pinned, which keeps the reported objective
// bit-comparable with an enumeration of the same LP engine.
//
// status semantics:
//   Optimal   proven within config.mipgap,
//   Infeasible no integer-feasible point exists,
//   GapLimit  stopped by the time limit with a residual gap,
//   NodeLimit stopped by the node budget; incumbent carried when found.
// An unbounded relaxation throws.
MilpSolution solve_milp(const MilpProblem& problem, const SolverConfig& config = SolverConfig{});

}  // namespace mipred::milp
