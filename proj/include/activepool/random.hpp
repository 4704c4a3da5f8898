#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace activepool {

// Seeded random stream. The engine is std::mt19937_64, whose output sequence
// is fixed by the C++ standard; every distribution used on top of it is
// implemented here so draws are identical across standard libraries.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);

    // Uniform real in [0, 1) with 53 random bits.
    double uniform01();

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller (pairs cached).
    double normal();

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_index(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

    // Independent child stream keyed by tags, e.g. derive({iteration, kTrain}).
    // Depends only on this source's seed, never on how much was consumed.
    RandomSource derive(std::initializer_list<std::uint64_t> tags) const;

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace activepool
