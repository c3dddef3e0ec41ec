#pragma once

#include <cstdint>
#include <cstddef>

namespace ace {

// Splittable deterministic pseudo-random stream.
//
// A stream is fully determined by (seed, stream_id): identical pairs yield
// bit-identical draw sequences, distinct stream_ids yield statistically
// independent streams (state derived through a SplitMix64 avalanche of both
// words). One stream per thread of execution; no internal locking.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() noexcept;

    // Uniform on [0,1) with 53-bit resolution.
    double u01() noexcept;

    double uniform(double lo, double hi) noexcept;

    // Uniform index in {0,...,n-1}; n must be positive.
    std::size_t uniform_index(std::size_t n) noexcept;

    // Standard normal via Box-Muller; the spare deviate is cached.
    double normal() noexcept;
    double normal(double mean, double sd) noexcept;

    double log_normal(double log_mean, double log_var) noexcept;

    // Density 2(L-x)/L^2 on [0,L]; inverse-CDF draw L(1 - sqrt(1-U)).
    double triangular_decreasing(double upper) noexcept;

    // Knuth multiplication method, chunked so exp() never underflows.
    std::uint64_t poisson(double mean) noexcept;

private:
    std::uint64_t state_[4];
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_normal_ = false;
};

} // namespace ace
