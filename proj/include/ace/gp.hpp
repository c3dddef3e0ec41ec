#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ace/domain.hpp"
#include "ace/rng.hpp"

namespace ace {

struct EmptyDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Standardized {
    double mean = 0.0;      // sample mean
    double sd = 0.0;        // sample SD, divisor m-1
    std::vector<double> z;  // standardized values; empty when constant
    bool constant = false;  // sd == 0: emulation carries no information
};

/// Sample mean/SD and standardized values of m >= 2 raw utility evaluations.
Standardized standardize(std::span<const double> values);

// Fitted one-dimensional GP smoother: zero-mean unit-variance process over
// the standardized values with squared-exponential correlation
// exp{-rho (x_s - x_t)^2} plus nugget eta on the diagonal.
struct EmulatorFit {
    std::vector<double> xi;       // training coordinates
    double mean = 0.0;            // mu-hat of the raw values
    double sd = 1.0;              // sigma-hat of the raw values
    std::vector<double> z;
    double rho = 1.0;
    double eta = 1.0;
    std::vector<double> weights;  // A^{-1} z
    bool hyperparams_converged = true;
    bool diagonal_boosted = false;

    double predict(double x) const;
};

/// Zero-mean GP log-likelihood -log det A / 2 - z^T A^{-1} z / 2 (constant
/// dropped) at the given log-parameters; -inf when A is not numerically PD.
double gp_log_likelihood(std::span<const double> xi, std::span<const double> z, double log_rho,
                         double log_eta);

struct HyperparamEstimate {
    double log_rho = 0.0;
    double log_eta = 0.0;
    double log_likelihood = 0.0;
    bool converged = true;
};

/// Maximum likelihood in (log rho, log eta) by Fisher scoring with
/// step-halving, at most 50 iterations per start, three starts at
/// log eta in {-4, -1, 1} with rho from the median-distance heuristic,
/// parameters clipped to log rho in [-10, 15], log eta in [-10, 5].
/// Never throws on non-convergence: the best iterate is returned flagged.
HyperparamEstimate fit_hyperparams(std::span<const double> xi, std::span<const double> z);

/// Standardize, estimate hyperparameters, and precompute prediction weights.
/// Throws std::invalid_argument for constant values (callers are expected to
/// test via standardize first) or fewer than 3 points.
EmulatorFit fit_emulator(std::span<const double> xi, std::span<const double> values);

/// Emulator with fixed hyperparameters (no MLE step).
EmulatorFit make_emulator(std::span<const double> xi, std::span<const double> values, double rho,
                          double eta);

/// Posterior predictive mean at x.
double predict_mean(const EmulatorFit& fit, double x);

struct GridMaxResult {
    double argmax = 0.0;
    double value = 0.0;
    std::size_t feasible_candidates = 0;
};

/// Draw n_grid uniform candidates in the domain (its levels, when finite),
/// keep those passing `feasible`, and return the first-drawn maximizer of
/// the predictive mean. Throws EmptyDomainError when no candidate passes.
GridMaxResult maximize_on_grid(const EmulatorFit& fit, const CoordinateDomain& domain,
                               const std::function<bool(double)>& feasible, std::size_t n_grid,
                               RngStream& rng);

} // namespace ace
