#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ace/rng.hpp"

namespace ace {

enum class MarginalKind {
    Uniform,               // p1 = lo, p2 = hi
    Normal,                // p1 = mean, p2 = variance
    LogNormal,             // p1 = log-mean, p2 = log-variance
    TriangularDecreasing,  // p1 = L, density 2(L-x)/L^2 on [0,L]
    PointMass,             // p1 = value
    Poisson,               // p1 = rate
    UniformHalfWidth,      // U[-parent, parent], hierarchical on parameter `parent`
};

struct Marginal {
    MarginalKind kind = MarginalKind::PointMass;
    double p1 = 0.0;
    double p2 = 0.0;
    std::size_t parent = 0;

    static Marginal uniform(double lo, double hi) { return {MarginalKind::Uniform, lo, hi, 0}; }
    static Marginal normal(double mean, double variance) { return {MarginalKind::Normal, mean, variance, 0}; }
    static Marginal log_normal(double log_mean, double log_variance) {
        return {MarginalKind::LogNormal, log_mean, log_variance, 0};
    }
    static Marginal triangular_decreasing(double upper) {
        return {MarginalKind::TriangularDecreasing, upper, 0.0, 0};
    }
    static Marginal point_mass(double value) { return {MarginalKind::PointMass, value, 0.0, 0}; }
    static Marginal poisson(double rate) { return {MarginalKind::Poisson, rate, 0.0, 0}; }
    static Marginal uniform_half_width(std::size_t parent_index) {
        return {MarginalKind::UniformHalfWidth, 0.0, 0.0, parent_index};
    }
};

// Independent marginals, except UniformHalfWidth entries which condition on
// an earlier-drawn parameter (nesting depth at most one).
struct PriorSpec {
    std::vector<Marginal> marginals;

    std::size_t dim() const noexcept { return marginals.size(); }

    /// Throws std::invalid_argument on non-finite hyperparameters, empty
    /// ranges, non-positive scale parameters, or invalid nesting.
    void validate() const;

    /// One draw; `out` must have size dim(). Hierarchical entries read the
    /// already-drawn parent value from `out`.
    void sample(RngStream& rng, std::span<double> out) const;
};

/// `count` independent draws, row-major count x dim().
std::vector<double> sample_prior(const PriorSpec& spec, std::size_t count, RngStream& rng);

} // namespace ace
