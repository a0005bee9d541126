#pragma once

#include <cstdint>
#include <random>

namespace corrsched {

/// Seeded 64-bit generator shared by event sampling and common randomness.
///
/// Streams are derived from (seed, stream) through std::seed_seq, so two
/// generators built from the same pair produce identical sequences.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next() { return engine_(); }

    /// Independent child generator for the given stream id.
    Rng split(std::uint64_t stream) { return Rng(engine_(), stream); }

private:
    std::mt19937_64 engine_;
};

}  // namespace corrsched
