#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>

namespace revpanel {

// Portable generator: std::mt19937_64 seeded through std::seed_seq (both
// bit-exact by the standard), with explicit transforms instead of the
// implementation-defined std distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64() { return engine_(); }
    // [0, 1) with 53 random bits.
    double uniform();
    // Standard normal, Box-Muller.
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    int poisson(double lambda);
    // Index drawn with probability proportional to weights.
    std::size_t categorical(std::span<const double> weights);

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

}  // namespace revpanel
