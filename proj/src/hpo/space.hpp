#pragma once

#include <string>
#include <vector>

namespace mipred::hpo {

enum class DimensionScale { Linear, Log10 };
enum class DimensionKind { Real, Integer };

struct HyperDimension {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
    DimensionScale scale = DimensionScale::Linear;
    DimensionKind kind = DimensionKind::Real;
};

// Search box for hyperparameter optimization. The optimizer works in the unit
// cube; points map to native coordinates via the per-dimension scale, with
// integer dimensions rounded to the nearest whole value inside the bounds.
struct HyperSpace {
    std::vector<HyperDimension> dims;

    int size() const { return static_cast<int>(dims.size()); }
    void validate() const;
    std::vector<double> from_unit(const std::vector<double>& unit) const;
    std::vector<double> to_unit(const std::vector<double>& theta) const;
};

}  // namespace mipred::hpo
