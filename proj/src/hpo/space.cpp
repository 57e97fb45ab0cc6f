#include "hpo/space.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace mipred::hpo {

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("hyperparameter space: " + msg);
}

}  // namespace

void HyperSpace::validate() const {
    if (dims.empty()) fail("no dimensions declared");
    std::set<std::string> names;
    for (const HyperDimension& d : dims) {
        if (d.name.empty()) fail("dimension without a name");
        if (!names.insert(d.name).second) fail("duplicate dimension name '" + d.name + "'");
        if (!(d.lower < d.upper))
            fail("dimension '" + d.name + "' needs lower < upper");
        if (d.scale == DimensionScale::Log10 && !(d.lower > 0.0))
            fail("dimension '" + d.name + "' uses a log scale and needs a positive lower bound");
        if (d.kind == DimensionKind::Integer &&
            std::llround(d.lower) > std::llround(d.upper))
            fail("dimension '" + d.name + "' has no integer inside its bounds");
    }
}

std::vector<double> HyperSpace::from_unit(const std::vector<double>& unit) const {
    if (static_cast<int>(unit.size()) != size()) fail("unit point has the wrong dimension");
    std::vector<double> theta(unit.size());
    for (size_t i = 0; i < dims.size(); ++i) {
        const HyperDimension& d = dims[i];
        const double u = std::clamp(unit[i], 0.0, 1.0);
        double value;
        if (d.scale == DimensionScale::Log10) {
            const double lo = std::log10(d.lower);
            const double hi = std::log10(d.upper);
            value = std::pow(10.0, lo + u * (hi - lo));
        } else {
            value = d.lower + u * (d.upper - d.lower);
        }
        if (d.kind == DimensionKind::Integer) {
            value = static_cast<double>(std::llround(value));
            value = std::clamp(value, std::ceil(d.lower), std::floor(d.upper));
        } else {
            value = std::clamp(value, d.lower, d.upper);
        }
        theta[i] = value;
    }
    return theta;
}

std::vector<double> HyperSpace::to_unit(const std::vector<double>& theta) const {
    if (static_cast<int>(theta.size()) != size()) fail("point has the wrong dimension");
    std::vector<double> unit(theta.size());
    for (size_t i = 0; i < dims.size(); ++i) {
        const HyperDimension& d = dims[i];
        double u;
        if (d.scale == DimensionScale::Log10) {
            if (!(theta[i] > 0.0)) fail("log-scaled value must be positive");
            u = (std::log10(theta[i]) - std::log10(d.lower)) /
                (std::log10(d.upper) - std::log10(d.lower));
        } else {
            u = (theta[i] - d.lower) / (d.upper - d.lower);
        }
        unit[i] = std::clamp(u, 0.0, 1.0);
    }
    return unit;
}

}  // namespace mipred::hpo
