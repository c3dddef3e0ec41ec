#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ace/rng.hpp"

namespace ace {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double length() const noexcept { return hi - lo; }
};

/// One-dimensional Latin hypercube sample: m points, one drawn uniformly
/// from each of m equal-width sub-intervals, returned in randomized order.
std::vector<double> lhs_1d(std::size_t m, Interval domain, RngStream& rng);

/// n x v design where each column is an independent 1-D Latin hypercube
/// sample over its domain, flattened column-major into a q = n*v vector.
/// `domains` gives one interval per column.
std::vector<double> lhs_random_design(std::size_t n, std::size_t v,
                                      std::span<const Interval> domains, RngStream& rng);

/// Maximin Latin hypercube comparator: starts from a random LHS and improves
/// the minimum pairwise distance (on the unit-scaled design) by simulated
/// annealing over within-column swaps, which preserves stratification.
std::vector<double> maximin_lhs(std::size_t n, std::size_t v,
                                std::span<const Interval> domains, RngStream& rng,
                                std::size_t iterations = 20000);

} // namespace ace
