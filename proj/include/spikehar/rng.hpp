#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace spikehar {

// Deterministic random source. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard, and all value conversions are done here
// by hand so that a seed produces the same stream on every platform
// (std::uniform_real_distribution et al. make no such guarantee).
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; consumes engine output deterministically.
    double normal();

    // Uniform integer in [0, bound). Modulo bias is ~2^-64 * bound; negligible
    // for the index ranges used here and keeps the draw count fixed.
    std::int64_t uniform_int(std::int64_t bound) {
        return static_cast<std::int64_t>(next_u64() % static_cast<std::uint64_t>(bound));
    }

    // Fisher-Yates permutation of 0..n-1.
    std::vector<std::int64_t> permutation(std::int64_t n);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace spikehar
