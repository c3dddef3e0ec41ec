#include "ace/lhs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ace {

namespace {

void shuffle_in_place(std::span<double> values, RngStream& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        std::swap(values[i - 1], values[rng.uniform_index(i)]);
    }
}

double min_pairwise_distance_sq(const std::vector<std::vector<double>>& unit_rows) {
    const std::size_t n = unit_rows.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < unit_rows[i].size(); ++k) {
                const double d = unit_rows[i][k] - unit_rows[j][k];
                d2 += d * d;
            }
            best = std::min(best, d2);
        }
    }
    return best;
}

} // namespace

std::vector<double> lhs_1d(std::size_t m, Interval domain, RngStream& rng) {
    if (m < 1) throw std::invalid_argument("lhs_1d: m must be positive");
    if (!(domain.length() > 0.0)) throw std::invalid_argument("lhs_1d: degenerate domain");
    const double width = domain.length() / static_cast<double>(m);
    std::vector<double> points(m);
    for (std::size_t j = 0; j < m; ++j) {
        points[j] = domain.lo + (static_cast<double>(j) + rng.u01()) * width;
    }
    shuffle_in_place(points, rng);
    return points;
}

std::vector<double> lhs_random_design(std::size_t n, std::size_t v,
                                      std::span<const Interval> domains, RngStream& rng) {
    if (n < 1 || v < 1) throw std::invalid_argument("lhs_random_design: n, v must be positive");
    if (domains.size() != v) {
        throw std::invalid_argument("lhs_random_design: need one domain per variable");
    }
    std::vector<double> delta(n * v);
    for (std::size_t j = 0; j < v; ++j) {
        const auto column = lhs_1d(n, domains[j], rng);
        std::copy(column.begin(), column.end(), delta.begin() + static_cast<std::ptrdiff_t>(j * n));
    }
    return delta;
}

std::vector<double> maximin_lhs(std::size_t n, std::size_t v,
                                std::span<const Interval> domains, RngStream& rng,
                                std::size_t iterations) {
    std::vector<double> delta = lhs_random_design(n, v, domains, rng);
    if (n < 2) return delta;

    // Work on the unit scale so columns with wide domains do not dominate.
    std::vector<std::vector<double>> unit(n, std::vector<double>(v));
    for (std::size_t j = 0; j < v; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            unit[k][j] = (delta[j * n + k] - domains[j].lo) / domains[j].length();
        }
    }

    double current = min_pairwise_distance_sq(unit);
    double temperature = 0.1;
    const double cooling = std::pow(1e-4, 1.0 / static_cast<double>(std::max<std::size_t>(iterations, 1)));
    for (std::size_t it = 0; it < iterations; ++it) {
        const std::size_t col = rng.uniform_index(v);
        const std::size_t a = rng.uniform_index(n);
        std::size_t b = rng.uniform_index(n - 1);
        if (b >= a) ++b;
        std::swap(unit[a][col], unit[b][col]);
        const double candidate = min_pairwise_distance_sq(unit);
        const bool keep = candidate >= current ||
                          rng.u01() < std::exp((candidate - current) / temperature);
        if (keep) {
            current = candidate;
        } else {
            std::swap(unit[a][col], unit[b][col]);
        }
        temperature *= cooling;
    }

    for (std::size_t j = 0; j < v; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            delta[j * n + k] = domains[j].lo + unit[k][j] * domains[j].length();
        }
    }
    return delta;
}

} // namespace ace
