#pragma once

// Conjugate test model: y_i ~ N(theta, sigma2) i.i.d. with theta ~ N(m0, tau2)
// and no nuisance block. Closed forms used as estimator oracles:
//   expected Shannon information gain = 0.5 log(1 + tau2 n / sigma2),
//   expected negative posterior variance = -1 / (1/tau2 + n/sigma2).
// The design enters only through its run count.

#include <cmath>
#include <vector>

#include "ace/model.hpp"

namespace ace::testing {

class NormalNormalModel final : public Model {
public:
    NormalNormalModel(double prior_mean = 0.0, double prior_var = 1.0, double noise_var = 1.0)
        : prior_mean_(prior_mean), prior_sd_(std::sqrt(prior_var)),
          noise_var_(noise_var), noise_sd_(std::sqrt(noise_var)) {}

    std::string_view name() const override { return "normal_normal"; }
    std::size_t param_dim() const override { return 1; }
    std::size_t interest_dim() const override { return 1; }

    void sample_params(RngStream& rng, std::span<double> psi) const override {
        psi[0] = rng.normal(prior_mean_, prior_sd_);
    }

    void simulate(std::span<const double> psi, const Design& design, RngStream& rng,
                  std::vector<double>& y) const override {
        y.resize(design.n_runs());
        for (auto& value : y) value = rng.normal(psi[0], noise_sd_);
    }

    double log_likelihood(std::span<const double> y, std::span<const double> psi,
                          const Design& design) const override {
        (void)design;
        double total = 0.0;
        for (double value : y) {
            const double r = value - psi[0];
            total += -0.5 * std::log(6.283185307179586 * noise_var_) - 0.5 * r * r / noise_var_;
        }
        return total;
    }

    double expected_sig(std::size_t n) const {
        return 0.5 * std::log(1.0 + prior_sd_ * prior_sd_ * static_cast<double>(n) / noise_var_);
    }

    double expected_nsel(std::size_t n) const {
        const double tau2 = prior_sd_ * prior_sd_;
        return -1.0 / (1.0 / tau2 + static_cast<double>(n) / noise_var_);
    }

private:
    double prior_mean_;
    double prior_sd_;
    double noise_var_;
    double noise_sd_;
};

inline Design unit_design(std::size_t n) {
    return Design(n, 1, std::vector<double>(n, 0.5));
}

} // namespace ace::testing
