#pragma once

#include "ace/model.hpp"
#include "ace/prior.hpp"

namespace ace {

/// log Fisher information of the one-point Poisson model y ~ Poisson(e^{beta x}):
/// 2 log|x| + beta x. Throws std::domain_error at x = 0.
double poisson_toy_utility(double beta, double x);

// Single-run, single-variable Poisson model y | beta ~ Poisson(e^{beta x})
// with a scalar prior on beta. The analytically tractable test bed: under
// the pseudo-D utility with beta ~ N(0.5, 1) the optimum is x* = 1.
class PoissonToyModel final : public Model {
public:
    explicit PoissonToyModel(Marginal beta_prior = Marginal::normal(0.5, 1.0));

    std::string_view name() const override { return "poisson_toy"; }
    std::size_t param_dim() const override { return 1; }
    std::size_t interest_dim() const override { return 1; }

    void sample_params(RngStream& rng, std::span<double> psi) const override;
    void simulate(std::span<const double> psi, const Design& design, RngStream& rng,
                  std::vector<double>& y) const override;
    double log_likelihood(std::span<const double> y, std::span<const double> psi,
                          const Design& design) const override;

    bool has_fisher_information() const override { return true; }
    void fisher_information(std::span<const double> psi, const Design& design, RngStream& rng,
                            Matrix& out) const override;

private:
    PriorSpec prior_;
};

} // namespace ace
