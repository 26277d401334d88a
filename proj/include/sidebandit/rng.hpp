#pragma once

#include <cstdint>
#include <random>

namespace sidebandit {

/// SplitMix64 finalizer. Used to derive well-separated seeds for independent
/// streams from a (base seed, stream id) pair.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seeded random stream. Each replication owns one; streams derived from the
/// same base seed with different ids are independent for practical purposes.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    static Rng for_stream(std::uint64_t base_seed, std::uint64_t stream_id) {
        return Rng(splitmix64(base_seed) ^ splitmix64(~stream_id));
    }

    double normal(double mean, double stddev) {
        return mean + stddev * std_normal_(engine_);
    }

    double standard_normal() { return std_normal_(engine_); }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * unit_(engine_);
    }

    bool bernoulli(double p) { return unit_(engine_) < p; }

    std::uint64_t next_u64() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> std_normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace sidebandit
