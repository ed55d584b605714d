#pragma once

#include <cstdint>
#include <random>

#include "pspp/linalg.hpp"

namespace pspp {

// Deterministic random source.  All distributions are implemented here
// rather than with <random>'s distribution objects, whose output is
// implementation-defined; the same (seed, stream) pair must reproduce the
// same draws on every platform and toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

    // Independent substream derived from (seed, index); lets any
    // replication of an experiment be regenerated in isolation.
    static Rng stream(std::uint64_t seed, std::uint64_t index);

    // Uniform on (0, 1).
    double uniform();

    // Standard normal via the Marsaglia polar method.
    double normal();

    Vector normal_vector(Index n);

    // Gamma(shape, scale) via Marsaglia-Tsang squeeze; shape > 0.
    double gamma(double shape, double scale = 1.0);

    // Chi-square with real dof > 0.
    double chi_square(double dof) { return gamma(0.5 * dof, 2.0); }

    std::uint64_t next_u64() { return engine_(); }

private:
    static std::uint64_t mix(std::uint64_t z);

    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace pspp
