#include <doctest.h>

#include <cmath>
#include <vector>

#include "ace/rng.hpp"

using ace::RngStream;

namespace {

struct Moments {
    double mean;
    double sd;
};

template <typename Draw>
Moments sample_moments(std::size_t count, Draw&& draw) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double x = draw();
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / static_cast<double>(count);
    return {mean, std::sqrt(sum_sq / static_cast<double>(count) - mean * mean)};
}

} // namespace

TEST_CASE("identical (seed, stream) pairs replay bit-identical sequences") {
    RngStream a(123456789, 7);
    RngStream b(123456789, 7);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct stream ids diverge") {
    RngStream a(42, 0);
    RngStream b(42, 1);
    bool any_different = false;
    for (int i = 0; i < 16; ++i) any_different |= (a.next_u64() != b.next_u64());
    CHECK(any_different);
}

TEST_CASE("u01 stays in [0,1) and fills the range") {
    RngStream rng(9, 0);
    double lo = 1.0;
    double hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.u01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.001);
    CHECK(hi > 0.999);
}

TEST_CASE("empirical moments match analytic moments within 3 standard errors") {
    const std::size_t n = 1000000;
    const double root_n = std::sqrt(static_cast<double>(n));

    SUBCASE("standard normal") {
        RngStream rng(1001, 0);
        const auto m = sample_moments(n, [&] { return rng.normal(); });
        CHECK(std::abs(m.mean) < 3.0 / root_n);
        CHECK(std::abs(m.sd - 1.0) < 3.0 / root_n);
    }
    SUBCASE("uniform") {
        RngStream rng(1002, 0);
        const auto m = sample_moments(n, [&] { return rng.uniform(-1.0, 3.0); });
        // mean 1, sd 4/sqrt(12)
        const double sd = 4.0 / std::sqrt(12.0);
        CHECK(std::abs(m.mean - 1.0) < 3.0 * sd / root_n);
        CHECK(std::abs(m.sd - sd) < 0.01);
    }
    SUBCASE("poisson(3.7)") {
        RngStream rng(1003, 0);
        const auto m = sample_moments(n, [&] { return static_cast<double>(rng.poisson(3.7)); });
        CHECK(std::abs(m.mean - 3.7) < 3.0 * std::sqrt(3.7) / root_n);
        CHECK(std::abs(m.sd - std::sqrt(3.7)) < 0.02);
    }
    SUBCASE("poisson(60) group sizes") {
        RngStream rng(1004, 0);
        const auto m = sample_moments(200000, [&] { return static_cast<double>(rng.poisson(60.0)); });
        CHECK(std::abs(m.mean - 60.0) < 3.0 * std::sqrt(60.0) / std::sqrt(200000.0));
    }
    SUBCASE("triangular-decreasing mean L/3, second moment L^2/6") {
        RngStream rng(1005, 0);
        const double upper = 3.0;
        const auto m = sample_moments(n, [&] { return rng.triangular_decreasing(upper); });
        CHECK(std::abs(m.mean - upper / 3.0) < 0.01);
        const double var = upper * upper / 6.0 - upper * upper / 9.0;
        CHECK(std::abs(m.sd - std::sqrt(var)) < 0.01);
    }
    SUBCASE("log-normal median") {
        RngStream rng(1006, 0);
        std::vector<double> draws(n);
        for (auto& d : draws) d = rng.log_normal(std::log(0.1), 0.05);
        std::nth_element(draws.begin(), draws.begin() + n / 2, draws.end());
        CHECK(std::abs(draws[n / 2] - 0.1) < 0.001);
    }
}

TEST_CASE("triangular draws stay inside [0, L]") {
    RngStream rng(77, 3);
    for (int i = 0; i < 10000; ++i) {
        const double x = rng.triangular_decreasing(2.5);
        CHECK(x >= 0.0);
        CHECK(x <= 2.5);
    }
}

TEST_CASE("uniform_index covers all buckets") {
    RngStream rng(5, 0);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_index(7)];
    for (int c : counts) CHECK(c > 9000);
}
