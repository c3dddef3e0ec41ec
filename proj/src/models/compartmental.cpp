#include "ace/models/compartmental.hpp"

#include <cmath>
#include <stdexcept>

#include "ace/math.hpp"

namespace ace {

namespace {

constexpr double kSigma2 = 0.1;
constexpr double kDoseScale = 400.0;
constexpr double kMinQuantileGap = 0.25 / 24.0;

struct CompartmentalTerms {
    double a;
    double mu;
    double mean;
    double var;
};

CompartmentalTerms evaluate_terms(std::span<const double> theta, double t) {
    const double t1 = theta[0];
    const double t2 = theta[1];
    const double t3 = theta[2];
    if (t2 == t1) throw std::domain_error("compartmental model: theta2 == theta1 pole");
    CompartmentalTerms out;
    out.a = kDoseScale * t2 / (t3 * (t2 - t1));
    out.mu = std::exp(-t1 * t) - std::exp(-t2 * t);
    out.mean = out.a * out.mu;
    out.var = kSigma2 * (1.0 + out.mean * out.mean / 10.0);
    return out;
}

} // namespace

MeanSd compartmental_mean_sd(std::span<const double> theta, double t) {
    const auto terms = evaluate_terms(theta, t);
    return {terms.mean, std::sqrt(terms.var)};
}

std::vector<double> beta_drs_expand(double alpha1, double alpha2, std::size_t n) {
    if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) {
        throw std::invalid_argument("beta_drs_expand: shape parameters must be positive");
    }
    std::vector<double> times(n);
    for (std::size_t j = 1; j <= n; ++j) {
        const double p = static_cast<double>(j) / static_cast<double>(n + 1);
        times[j - 1] = 24.0 * beta_quantile(p, alpha1, alpha2);
    }
    return times;
}

bool drs_domain_check(double candidate, double other, std::size_t n, int which) {
    if (!(candidate > 0.0)) return false;
    const double a1 = which == 1 ? candidate : other;
    const double a2 = which == 1 ? other : candidate;
    double prev = beta_quantile(1.0 / static_cast<double>(n + 1), a1, a2);
    for (std::size_t j = 2; j <= n; ++j) {
        const double next = beta_quantile(static_cast<double>(j) / static_cast<double>(n + 1), a1, a2);
        if (!(std::abs(next - prev) > kMinQuantileGap)) return false;
        prev = next;
    }
    return true;
}

PriorSpec CompartmentalModel::default_prior() {
    PriorSpec prior;
    prior.marginals = {
        Marginal::log_normal(std::log(0.1), 0.05),
        Marginal::log_normal(std::log(1.0), 0.05),
        Marginal::log_normal(std::log(20.0), 0.05),
    };
    return prior;
}

CompartmentalModel::CompartmentalModel(PriorSpec theta_prior) : prior_(std::move(theta_prior)) {
    if (prior_.dim() != 3) {
        throw std::invalid_argument("CompartmentalModel: prior must cover (theta1, theta2, theta3)");
    }
    prior_.validate();
}

void CompartmentalModel::sample_params(RngStream& rng, std::span<double> psi) const {
    prior_.sample(rng, psi);
}

void CompartmentalModel::simulate(std::span<const double> psi, const Design& design,
                                  RngStream& rng, std::vector<double>& y) const {
    y.resize(design.n_runs());
    for (std::size_t k = 0; k < design.n_runs(); ++k) {
        const auto terms = evaluate_terms(psi, design.run_value(k, 0));
        y[k] = rng.normal(terms.mean, std::sqrt(terms.var));
    }
}

double CompartmentalModel::log_likelihood(std::span<const double> y, std::span<const double> psi,
                                          const Design& design) const {
    constexpr double kLogTwoPi = 1.8378770664093454836;
    double total = 0.0;
    for (std::size_t k = 0; k < design.n_runs(); ++k) {
        const auto terms = evaluate_terms(psi, design.run_value(k, 0));
        const double r = y[k] - terms.mean;
        total += -0.5 * (kLogTwoPi + std::log(terms.var)) - 0.5 * r * r / terms.var;
    }
    return total;
}

void CompartmentalModel::fisher_information(std::span<const double> psi, const Design& design,
                                            RngStream& rng, Matrix& out) const {
    (void)rng;
    const double t1 = psi[0];
    const double t2 = psi[1];
    const double t3 = psi[2];
    out.resize(3, 3);
    for (std::size_t k = 0; k < design.n_runs(); ++k) {
        const double t = design.run_value(k, 0);
        const auto terms = evaluate_terms(psi, t);
        const double da1 = terms.a / (t2 - t1);
        const double da2 = terms.a / t2 - terms.a / (t2 - t1);
        const double da3 = -terms.a / t3;
        const double dmu1 = -t * std::exp(-t1 * t);
        const double dmu2 = t * std::exp(-t2 * t);
        const double grad[3] = {
            da1 * terms.mu + terms.a * dmu1,
            da2 * terms.mu + terms.a * dmu2,
            da3 * terms.mu,
        };
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) out(i, j) += grad[i] * grad[j] / terms.var;
        }
    }
}

Design drs_expand_design(const Design& alphas, std::size_t n_times) {
    if (alphas.q() != 2) {
        throw std::invalid_argument("drs_expand_design: design must hold (alpha1, alpha2)");
    }
    return Design(n_times, 1, beta_drs_expand(alphas.coord(0), alphas.coord(1), n_times));
}

CoordinateConstraint min_spacing_constraint(double min_gap) {
    return [min_gap](std::size_t i, double value, const Design& current) {
        for (std::size_t j = 0; j < current.q(); ++j) {
            if (j == i) continue;
            if (std::abs(value - current.coord(j)) < min_gap) return false;
        }
        return true;
    };
}

CoordinateConstraint drs_spacing_constraint(std::size_t n_times) {
    return [n_times](std::size_t i, double value, const Design& current) {
        const double other = current.coord(1 - i);
        if (!(other > 0.0)) return value > 0.0;  // partner not yet placed
        return drs_domain_check(value, other, n_times, i == 0 ? 1 : 2);
    };
}

} // namespace ace
