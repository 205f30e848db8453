#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace lcg {

std::uint64_t splitmix64(std::uint64_t& state);

// Stateless 64-bit mixing of two words; used to derive independent streams
// from (seed, counter) keys.
std::uint64_t mix_key(std::uint64_t a, std::uint64_t b);

/// xoshiro256** generator. Streams are derived from a (seed, index) key so a
/// Monte Carlo loop can hand index i to any worker and get the same draws.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed);

    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(mix_key(seed, index));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return next(); }
    std::uint64_t next();

    // Uniform in [0, 1) with 53 random bits.
    double uniform();
    bool bernoulli(double p) { return uniform() < p; }
    // Uniform integer in [0, n); n > 0. Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n);
    double normal();

    // Uniformly random t-subset of {0..n-1}, returned sorted.
    std::vector<std::uint32_t> subset(std::uint32_t n, std::uint32_t t);

    template <class T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::uint64_t s_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace lcg
