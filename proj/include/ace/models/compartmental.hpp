#pragma once

#include "ace/model.hpp"
#include "ace/prior.hpp"

namespace ace {

/// Mean a(theta)*mu(theta;t) and standard deviation sqrt(sigma2*b(theta;t))
/// of the compartmental concentration at time t, with
///   mu = exp(-theta1 t) - exp(-theta2 t),
///   a  = 400 theta2 / (theta3 (theta2 - theta1)),
///   b  = 1 + a^2 mu^2 / 10,   sigma2 = 0.1.
/// Throws std::domain_error when theta2 == theta1.
struct MeanSd {
    double mean;
    double sd;
};
MeanSd compartmental_mean_sd(std::span<const double> theta, double t);

/// Sampling times as scaled Beta quantiles: t_j = 24 Q(j/(n+1); a1, a2),
/// j = 1..n. Strictly increasing for all a1, a2 > 0.
std::vector<double> beta_drs_expand(double alpha1, double alpha2, std::size_t n);

/// Membership test for the constrained shape-parameter sets: true iff all
/// consecutive quantile gaps exceed 0.25/24 when coordinate `which` (1 or 2)
/// takes `candidate` and the other shape parameter stays at `other`.
bool drs_domain_check(double candidate, double other, std::size_t n, int which);

// Concentration sampling over n time points in [0, 24] hours; theta has
// three positive rates, sigma2 = 0.1 is fixed, no nuisance block.
class CompartmentalModel final : public Model {
public:
    static PriorSpec default_prior();

    explicit CompartmentalModel(PriorSpec theta_prior = default_prior());

    std::string_view name() const override { return "compartmental"; }
    std::size_t param_dim() const override { return 3; }
    std::size_t interest_dim() const override { return 3; }

    void sample_params(RngStream& rng, std::span<double> psi) const override;
    void simulate(std::span<const double> psi, const Design& design, RngStream& rng,
                  std::vector<double>& y) const override;
    double log_likelihood(std::span<const double> y, std::span<const double> psi,
                          const Design& design) const override;

    bool has_fisher_information() const override { return true; }
    /// J^T V^{-1} J with J the Jacobian of the mean response in theta and
    /// V = diag(sigma2 b); the variance's theta-dependence is ignored.
    void fisher_information(std::span<const double> psi, const Design& design, RngStream& rng,
                            Matrix& out) const override;

private:
    PriorSpec prior_;
};

/// Times design implied by a shape-parameter design (alpha1, alpha2).
Design drs_expand_design(const Design& alphas, std::size_t n_times);

/// Coordinate constraint for single-variable time designs: a candidate value
/// must keep every pairwise |t_s - t_t| >= min_gap.
CoordinateConstraint min_spacing_constraint(double min_gap);

/// Coordinate constraint for the two-coordinate Beta-DRS design: membership
/// in D_1 / D_2 through drs_domain_check against the other shape parameter.
CoordinateConstraint drs_spacing_constraint(std::size_t n_times);

} // namespace ace
