#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "ace/domain.hpp"
#include "ace/linalg.hpp"
#include "ace/rng.hpp"

namespace ace {

// Statistical model plug-in. The parameter vector psi stores the p interest
// parameters theta first, followed by the nuisance block gamma.
class Model {
public:
    virtual ~Model() = default;

    virtual std::string_view name() const = 0;

    virtual std::size_t param_dim() const = 0;     // P
    virtual std::size_t interest_dim() const = 0;  // p

    std::size_t nuisance_dim() const { return param_dim() - interest_dim(); }

    /// Draw psi from the prior; `psi` must have size param_dim().
    virtual void sample_params(RngStream& rng, std::span<double> psi) const = 0;

    /// Redraw the nuisance block of psi from its prior conditional on theta
    /// (interest and nuisance blocks are a priori independent in all built-in
    /// models). Models without nuisance parameters leave psi untouched.
    virtual void resample_nuisance(RngStream& rng, std::span<double> psi) const {
        (void)rng;
        (void)psi;
        if (nuisance_dim() != 0) {
            throw std::logic_error("Model::resample_nuisance: override required");
        }
    }

    /// Simulate a response vector at `design`; size is model-defined
    /// (one observation per run for every built-in model).
    virtual void simulate(std::span<const double> psi, const Design& design, RngStream& rng,
                          std::vector<double>& y) const = 0;

    virtual double log_likelihood(std::span<const double> y, std::span<const double> psi,
                                  const Design& design) const = 0;

    virtual bool has_fisher_information() const { return false; }

    /// Fisher information for theta (p x p). `rng` feeds models whose
    /// information is itself a Monte Carlo approximation.
    virtual void fisher_information(std::span<const double> psi, const Design& design,
                                    RngStream& rng, Matrix& out) const {
        (void)psi;
        (void)design;
        (void)rng;
        (void)out;
        throw std::logic_error("Model::fisher_information: not available for this model");
    }
};

} // namespace ace
