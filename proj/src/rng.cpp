#include "ace/rng.hpp"

#include <cmath>

namespace ace {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
    std::uint64_t z = seed;
    (void)splitmix64(z);
    z ^= 0xd6e8feb86659fd93ull * (stream_id + 1);
    for (auto& word : state_) word = splitmix64(z);
    // An all-zero state would be absorbing for xoshiro.
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

// xoshiro256**
std::uint64_t RngStream::next_u64() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::u01() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * u01();
}

std::size_t RngStream::uniform_index(std::size_t n) noexcept {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

double RngStream::normal() noexcept {
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    double u1 = u01();
    while (u1 <= 0.0) u1 = u01();
    const double u2 = u01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_normal_ = r * std::sin(a);
    has_spare_normal_ = true;
    return r * std::cos(a);
}

double RngStream::normal(double mean, double sd) noexcept {
    return mean + sd * normal();
}

double RngStream::log_normal(double log_mean, double log_var) noexcept {
    return std::exp(normal(log_mean, std::sqrt(log_var)));
}

double RngStream::triangular_decreasing(double upper) noexcept {
    return upper * (1.0 - std::sqrt(1.0 - u01()));
}

std::uint64_t RngStream::poisson(double mean) noexcept {
    if (!(mean > 0.0)) return 0;
    constexpr double kStep = 500.0;
    double remaining = mean;
    double p = 1.0;
    std::uint64_t k = 0;
    while (true) {
        ++k;
        p *= u01();
        while (p < 1.0 && remaining > 0.0) {
            if (remaining > kStep) {
                p *= std::exp(kStep);
                remaining -= kStep;
            } else {
                p *= std::exp(remaining);
                remaining = 0.0;
            }
        }
        if (p <= 1.0 && remaining <= 0.0) return k - 1;
    }
}

} // namespace ace
