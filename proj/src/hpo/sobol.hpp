#pragma once

#include <vector>

namespace mipred::hpo {

// First `count` points of the Sobol low-discrepancy sequence in the unit
// cube (the leading all-zero point is skipped), generated in Gray-code order
// from shipped direction numbers. Supported dimensions: 1 through 16;
// higher dimensions throw.
std::vector<std::vector<double>> sobol_points(int dim, int count);

int sobol_max_dimension();

}  // namespace mipred::hpo
