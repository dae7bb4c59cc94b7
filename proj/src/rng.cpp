#include "revpanel/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "revpanel/error.hpp"

namespace revpanel {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (spare_) {
        double v = *spare_;
        spare_.reset();
        return v;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw Error("Rng::below(0)");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return v % n;
}

int Rng::poisson(double lambda) {
    if (!(lambda >= 0.0)) throw Error("poisson rate must be non-negative");
    if (lambda == 0.0) return 0;
    // Multiplication method, split into chunks so exp(-rate) stays normal.
    int total = 0;
    double remaining = lambda;
    while (remaining > 0.0) {
        const double chunk = std::min(remaining, 200.0);
        remaining -= chunk;
        const double limit = std::exp(-chunk);
        double prod = uniform();
        while (prod > limit) {
            ++total;
            prod *= uniform();
        }
    }
    return total;
}

std::size_t Rng::categorical(std::span<const double> weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw Error("categorical weights must have a positive sum");
    double u = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (u < weights[i]) return i;
        u -= weights[i];
    }
    for (std::size_t i = weights.size(); i-- > 0;) {
        if (weights[i] > 0.0) return i;
    }
    return 0;
}

}  // namespace revpanel
