#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace logprose {

// Seeded generator used by every stochastic component. Draws are built from
// raw mt19937_64 output rather than std distributions, whose algorithms are
// implementation-defined, so results are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    template <typename It>
    void shuffle(It first, It last) {
        const auto n = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = n; i > 1; --i) {
            const auto j = below(i);
            std::swap(first[i - 1], first[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// splitmix64 finalizer over (seed, FNV-1a(component)). Gives every stochastic
// component its own stream from one global seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view component);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view component, std::uint64_t index);

} // namespace logprose
