#pragma once

#include <array>

#include "ace/model.hpp"
#include "ace/prior.hpp"

namespace ace {

/// Bernoulli draws y_k ~ Bernoulli(logistic(x_k^T beta_eff)) for the rows of
/// the model matrix X (first column ones). `beta_eff` has one entry per
/// column of X.
std::vector<double> logistic_simulate(std::span<const double> beta_eff, const Matrix& model_matrix,
                                      RngStream& rng);

/// X^T W X with W = diag(rho_k (1 - rho_k)), rho_k = logistic(x_k^T beta).
Matrix logistic_fisher_info(std::span<const double> beta, const Matrix& model_matrix);

/// Monte Carlo approximation of the hierarchical-model information:
/// sum over groups of the prior-averaged conditional information
/// (1/R) sum_r X_s^T W_s(beta + omega_s^{(r)}) X_s with
/// omega_sr^{(r)} ~ U[-lambda_r, lambda_r]. Equals logistic_fisher_info
/// exactly when every lambda_r is zero.
Matrix hier_logistic_fisher_approx(std::span<const double> beta, std::span<const double> lambda,
                                   const Matrix& model_matrix, std::size_t groups,
                                   std::size_t runs_per_group, RngStream& rng, std::size_t mc_size);

// First-order logistic regression in four variables with homogeneous groups:
// beta (5 parameters of interest), no nuisance block. The design holds the
// last four columns of the model matrix, coordinates in [-1, 1].
class LogisticModel final : public Model {
public:
    static PriorSpec default_beta_prior();

    explicit LogisticModel(PriorSpec beta_prior = default_beta_prior());

    std::string_view name() const override { return "logistic"; }
    std::size_t param_dim() const override { return 5; }
    std::size_t interest_dim() const override { return 5; }

    void sample_params(RngStream& rng, std::span<double> psi) const override;
    void simulate(std::span<const double> psi, const Design& design, RngStream& rng,
                  std::vector<double>& y) const override;
    double log_likelihood(std::span<const double> y, std::span<const double> psi,
                          const Design& design) const override;

    bool has_fisher_information() const override { return true; }
    void fisher_information(std::span<const double> psi, const Design& design, RngStream& rng,
                            Matrix& out) const override;

    static Matrix model_matrix(const Design& design);

private:
    PriorSpec prior_;
};

// Hierarchical logistic regression: G groups of n_g runs with group effects
// omega_s added to beta. psi layout: beta (5), lambda (5), then omega row
// per group (5G). lambda_r carries a decreasing-triangular prior on [0, L_r]
// and omega_sr | lambda_r ~ U[-lambda_r, lambda_r].
class HierLogisticModel final : public Model {
public:
    static constexpr std::array<double, 5> kDefaultHalfWidthBounds = {3.0, 3.0, 3.0, 1.0, 1.0};

    HierLogisticModel(std::size_t groups, std::size_t runs_per_group,
                      PriorSpec beta_prior = LogisticModel::default_beta_prior(),
                      std::array<double, 5> half_width_bounds = kDefaultHalfWidthBounds,
                      std::size_t fisher_mc_size = 100);

    std::string_view name() const override { return "hier_logistic"; }
    std::size_t param_dim() const override { return 10 + 5 * groups_; }
    std::size_t interest_dim() const override { return 5; }

    std::size_t groups() const { return groups_; }
    std::size_t runs_per_group() const { return runs_per_group_; }

    void sample_params(RngStream& rng, std::span<double> psi) const override;
    void resample_nuisance(RngStream& rng, std::span<double> psi) const override;
    void simulate(std::span<const double> psi, const Design& design, RngStream& rng,
                  std::vector<double>& y) const override;
    double log_likelihood(std::span<const double> y, std::span<const double> psi,
                          const Design& design) const override;

    bool has_fisher_information() const override { return true; }
    void fisher_information(std::span<const double> psi, const Design& design, RngStream& rng,
                            Matrix& out) const override;

private:
    std::size_t group_of_run(std::size_t run, std::size_t n_runs) const;

    std::size_t groups_;
    std::size_t runs_per_group_;
    PriorSpec prior_;
    std::size_t fisher_mc_size_;
};

} // namespace ace
