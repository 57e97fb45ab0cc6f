#include "hpo/sobol.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mipred::hpo {

namespace {

constexpr int kBits = 32;
constexpr int kMaxDim = 16;

// Primitive-polynomial degree, coefficient bits, and initial direction
// integers for dimensions 2..16 (dimension 1 is the van der Corput sequence).
struct DirectionSeed {
    int degree;
    unsigned coefficients;
    unsigned initial[6];
};

constexpr DirectionSeed kSeeds[kMaxDim - 1] = {
    {1, 0, {1, 0, 0, 0, 0, 0}},        // dim 2
    {2, 1, {1, 3, 0, 0, 0, 0}},        // dim 3
    {3, 1, {1, 3, 1, 0, 0, 0}},        // dim 4
    {3, 2, {1, 1, 1, 0, 0, 0}},        // dim 5
    {4, 1, {1, 1, 3, 3, 0, 0}},        // dim 6
    {4, 4, {1, 3, 5, 13, 0, 0}},       // dim 7
    {5, 2, {1, 1, 5, 5, 17, 0}},       // dim 8
    {5, 4, {1, 1, 5, 5, 5, 0}},        // dim 9
    {5, 7, {1, 1, 7, 11, 19, 0}},      // dim 10
    {5, 11, {1, 1, 5, 1, 1, 0}},       // dim 11
    {5, 13, {1, 1, 1, 3, 11, 0}},      // dim 12
    {5, 14, {1, 3, 5, 5, 31, 0}},      // dim 13
    {6, 1, {1, 3, 3, 9, 7, 49}},       // dim 14
    {6, 13, {1, 1, 1, 15, 21, 21}},    // dim 15
    {6, 16, {1, 3, 1, 13, 27, 49}},    // dim 16
};

// Direction integers V[k] (k = 1..32) for one dimension, pre-shifted so that
// point bits accumulate in a 32-bit fraction.
std::vector<std::uint32_t> direction_integers(int dim_index) {
    std::vector<std::uint32_t> v(kBits + 1, 0);
    if (dim_index == 1) {
        for (int k = 1; k <= kBits; ++k) v[k] = 1u << (kBits - k);
        return v;
    }
    const DirectionSeed& seed = kSeeds[dim_index - 2];
    const int s = seed.degree;
    for (int k = 1; k <= s; ++k) v[k] = seed.initial[k - 1] << (kBits - k);
    for (int k = s + 1; k <= kBits; ++k) {
        v[k] = v[k - s] ^ (v[k - s] >> s);
        for (int i = 1; i <= s - 1; ++i) {
            if ((seed.coefficients >> (s - 1 - i)) & 1u) v[k] ^= v[k - i];
        }
    }
    return v;
}

}  // namespace

int sobol_max_dimension() { return kMaxDim; }

std::vector<std::vector<double>> sobol_points(int dim, int count) {
    if (dim < 1)
        throw std::runtime_error("sobol: dimension must be at least 1");
    if (dim > kMaxDim)
        throw std::runtime_error("sobol: dimension " + std::to_string(dim) +
                                 " exceeds the shipped direction-number table (max " +
                                 std::to_string(kMaxDim) + ")");
    if (count < 0) throw std::runtime_error("sobol: count must be non-negative");
    if (count > (1 << 24)) throw std::runtime_error("sobol: count too large");

    std::vector<std::vector<std::uint32_t>> v(static_cast<size_t>(dim));
    for (int j = 0; j < dim; ++j) v[static_cast<size_t>(j)] = direction_integers(j + 1);

    std::vector<std::vector<double>> points(static_cast<size_t>(count),
                                            std::vector<double>(static_cast<size_t>(dim)));
    std::vector<std::uint32_t> x(static_cast<size_t>(dim), 0);
    for (int i = 1; i <= count; ++i) {
        // Gray-code step: flip the direction integer indexed by the lowest
        // zero bit of i-1.
        unsigned value = static_cast<unsigned>(i - 1);
        int c = 1;
        while (value & 1u) {
            value >>= 1;
            ++c;
        }
        for (int j = 0; j < dim; ++j) {
            x[static_cast<size_t>(j)] ^= v[static_cast<size_t>(j)][c];
            points[static_cast<size_t>(i - 1)][static_cast<size_t>(j)] =
                static_cast<double>(x[static_cast<size_t>(j)]) * 0x1.0p-32;
        }
    }
    return points;
}

}  // namespace mipred::hpo
