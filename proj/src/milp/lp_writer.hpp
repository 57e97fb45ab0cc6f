#pragma once

#include <iosfwd>
#include <string>

#include "milp/problem.hpp"

namespace mipred::milp {

// Serializes the problem in CPLEX LP format (Minimize/Maximize, Subject To,
// Bounds, Binaries, End) so oversized models can be handed to an external
// solver. Throws on name collisions or names the format cannot represent.
void write_lp(const MilpProblem& problem, std::ostream& out);
void write_lp_file(const MilpProblem& problem, const std::string& path);

}  // namespace mipred::milp
