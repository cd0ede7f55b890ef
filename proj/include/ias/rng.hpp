#pragma once

#include <cstdint>
#include <random>

#include "ias/types.hpp"

namespace ias {

// Seeded generator with a fully pinned output stream: mt19937_64 (whose
// sequence is fixed by the C++ standard) mapped to doubles by explicit
// arithmetic, so data synthesis is bit-reproducible for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; one spare cached per pair.
    double normal();

    Vector normal_vector(Index n);

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ias
