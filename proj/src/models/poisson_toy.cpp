#include "ace/models/poisson_toy.hpp"

#include <cmath>
#include <stdexcept>

#include "ace/math.hpp"

namespace ace {

double poisson_toy_utility(double beta, double x) {
    if (x == 0.0) throw std::domain_error("poisson_toy_utility: log singularity at x = 0");
    return 2.0 * std::log(std::abs(x)) + beta * x;
}

PoissonToyModel::PoissonToyModel(Marginal beta_prior) {
    prior_.marginals = {beta_prior};
    prior_.validate();
}

void PoissonToyModel::sample_params(RngStream& rng, std::span<double> psi) const {
    prior_.sample(rng, psi);
}

void PoissonToyModel::simulate(std::span<const double> psi, const Design& design, RngStream& rng,
                               std::vector<double>& y) const {
    y.resize(design.n_runs());
    for (std::size_t k = 0; k < design.n_runs(); ++k) {
        y[k] = static_cast<double>(rng.poisson(std::exp(psi[0] * design.run_value(k, 0))));
    }
}

double PoissonToyModel::log_likelihood(std::span<const double> y, std::span<const double> psi,
                                       const Design& design) const {
    double total = 0.0;
    for (std::size_t k = 0; k < design.n_runs(); ++k) {
        total += log_poisson_pmf(y[k], std::exp(psi[0] * design.run_value(k, 0)));
    }
    return total;
}

void PoissonToyModel::fisher_information(std::span<const double> psi, const Design& design,
                                         RngStream& rng, Matrix& out) const {
    (void)rng;
    out.resize(1, 1);
    double info = 0.0;
    for (std::size_t k = 0; k < design.n_runs(); ++k) {
        const double x = design.run_value(k, 0);
        info += x * x * std::exp(psi[0] * x);
    }
    out(0, 0) = info;
}

} // namespace ace
