#include "ace/models/logistic.hpp"

#include <cmath>
#include <stdexcept>

#include "ace/math.hpp"

namespace ace {

namespace {

double row_dot(const Matrix& x, std::size_t row, std::span<const double> beta) {
    double eta = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) eta += x(row, j) * beta[j];
    return eta;
}

// log Bernoulli pmf with linear predictor eta: y log rho + (1-y) log(1-rho).
double log_bernoulli(double y, double eta) {
    return y > 0.5 ? -log1p_exp(-eta) : -log1p_exp(eta);
}

void accumulate_weighted_cross(const Matrix& x, std::size_t row, double weight, Matrix& out) {
    for (std::size_t i = 0; i < x.cols(); ++i) {
        const double wxi = weight * x(row, i);
        for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) += wxi * x(row, j);
    }
}

} // namespace

std::vector<double> logistic_simulate(std::span<const double> beta_eff, const Matrix& model_matrix,
                                      RngStream& rng) {
    std::vector<double> y(model_matrix.rows());
    for (std::size_t k = 0; k < model_matrix.rows(); ++k) {
        y[k] = rng.u01() < logistic(row_dot(model_matrix, k, beta_eff)) ? 1.0 : 0.0;
    }
    return y;
}

Matrix logistic_fisher_info(std::span<const double> beta, const Matrix& model_matrix) {
    Matrix info(model_matrix.cols(), model_matrix.cols());
    for (std::size_t k = 0; k < model_matrix.rows(); ++k) {
        const double rho = logistic(row_dot(model_matrix, k, beta));
        accumulate_weighted_cross(model_matrix, k, rho * (1.0 - rho), info);
    }
    return info;
}

Matrix hier_logistic_fisher_approx(std::span<const double> beta, std::span<const double> lambda,
                                   const Matrix& model_matrix, std::size_t groups,
                                   std::size_t runs_per_group, RngStream& rng,
                                   std::size_t mc_size) {
    if (mc_size < 1) throw std::invalid_argument("hier_logistic_fisher_approx: mc_size must be positive");
    if (model_matrix.rows() != groups * runs_per_group) {
        throw std::invalid_argument("hier_logistic_fisher_approx: rows must equal groups * runs_per_group");
    }
    const std::size_t p = model_matrix.cols();
    Matrix info(p, p);
    std::vector<double> shifted(p);
    for (std::size_t s = 0; s < groups; ++s) {
        Matrix group_info(p, p);
        for (std::size_t r = 0; r < mc_size; ++r) {
            for (std::size_t j = 0; j < p; ++j) {
                shifted[j] = beta[j] + rng.uniform(-lambda[j], lambda[j]);
            }
            for (std::size_t t = 0; t < runs_per_group; ++t) {
                const std::size_t row = s * runs_per_group + t;
                const double rho = logistic(row_dot(model_matrix, row, shifted));
                accumulate_weighted_cross(model_matrix, row, rho * (1.0 - rho), group_info);
            }
        }
        const double scale = 1.0 / static_cast<double>(mc_size);
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j) info(i, j) += scale * group_info(i, j);
        }
    }
    return info;
}

PriorSpec LogisticModel::default_beta_prior() {
    PriorSpec prior;
    prior.marginals = {
        Marginal::uniform(-3.0, 3.0),
        Marginal::uniform(4.0, 10.0),
        Marginal::uniform(5.0, 11.0),
        Marginal::uniform(-6.0, 0.0),
        Marginal::uniform(-2.5, 3.5),
    };
    return prior;
}

LogisticModel::LogisticModel(PriorSpec beta_prior) : prior_(std::move(beta_prior)) {
    if (prior_.dim() != 5) {
        throw std::invalid_argument("LogisticModel: prior must cover 5 regression parameters");
    }
    prior_.validate();
}

Matrix LogisticModel::model_matrix(const Design& design) {
    Matrix x(design.n_runs(), design.n_vars() + 1);
    for (std::size_t k = 0; k < design.n_runs(); ++k) {
        x(k, 0) = 1.0;
        for (std::size_t j = 0; j < design.n_vars(); ++j) x(k, j + 1) = design.run_value(k, j);
    }
    return x;
}

void LogisticModel::sample_params(RngStream& rng, std::span<double> psi) const {
    prior_.sample(rng, psi);
}

void LogisticModel::simulate(std::span<const double> psi, const Design& design, RngStream& rng,
                             std::vector<double>& y) const {
    y.resize(design.n_runs());
    for (std::size_t k = 0; k < design.n_runs(); ++k) {
        double eta = psi[0];
        for (std::size_t j = 0; j < design.n_vars(); ++j) {
            eta += psi[j + 1] * design.run_value(k, j);
        }
        y[k] = rng.u01() < logistic(eta) ? 1.0 : 0.0;
    }
}

double LogisticModel::log_likelihood(std::span<const double> y, std::span<const double> psi,
                                     const Design& design) const {
    double total = 0.0;
    for (std::size_t k = 0; k < design.n_runs(); ++k) {
        double eta = psi[0];
        for (std::size_t j = 0; j < design.n_vars(); ++j) {
            eta += psi[j + 1] * design.run_value(k, j);
        }
        total += log_bernoulli(y[k], eta);
    }
    return total;
}

void LogisticModel::fisher_information(std::span<const double> psi, const Design& design,
                                       RngStream& rng, Matrix& out) const {
    (void)rng;
    out = logistic_fisher_info(psi.subspan(0, 5), model_matrix(design));
}

HierLogisticModel::HierLogisticModel(std::size_t groups, std::size_t runs_per_group,
                                     PriorSpec beta_prior,
                                     std::array<double, 5> half_width_bounds,
                                     std::size_t fisher_mc_size)
    : groups_(groups), runs_per_group_(runs_per_group), fisher_mc_size_(fisher_mc_size) {
    if (groups_ < 1 || runs_per_group_ < 1) {
        throw std::invalid_argument("HierLogisticModel: groups and runs_per_group must be positive");
    }
    if (beta_prior.dim() != 5) {
        throw std::invalid_argument("HierLogisticModel: prior must cover 5 regression parameters");
    }
    prior_ = std::move(beta_prior);
    for (double bound : half_width_bounds) {
        prior_.marginals.push_back(Marginal::triangular_decreasing(bound));
    }
    for (std::size_t s = 0; s < groups_; ++s) {
        for (std::size_t r = 0; r < 5; ++r) {
            prior_.marginals.push_back(Marginal::uniform_half_width(5 + r));
        }
    }
    prior_.validate();
}

std::size_t HierLogisticModel::group_of_run(std::size_t run, std::size_t n_runs) const {
    (void)n_runs;
    const std::size_t s = run / runs_per_group_;
    return s < groups_ ? s : groups_ - 1;
}

void HierLogisticModel::sample_params(RngStream& rng, std::span<double> psi) const {
    prior_.sample(rng, psi);
}

void HierLogisticModel::resample_nuisance(RngStream& rng, std::span<double> psi) const {
    // lambda and omega are a priori independent of beta: redraw both blocks.
    for (std::size_t r = 0; r < 5; ++r) {
        psi[5 + r] = rng.triangular_decreasing(prior_.marginals[5 + r].p1);
    }
    for (std::size_t s = 0; s < groups_; ++s) {
        for (std::size_t r = 0; r < 5; ++r) {
            psi[10 + 5 * s + r] = rng.uniform(-psi[5 + r], psi[5 + r]);
        }
    }
}

void HierLogisticModel::simulate(std::span<const double> psi, const Design& design,
                                 RngStream& rng, std::vector<double>& y) const {
    y.resize(design.n_runs());
    for (std::size_t k = 0; k < design.n_runs(); ++k) {
        const std::size_t s = group_of_run(k, design.n_runs());
        double eta = psi[0] + psi[10 + 5 * s];
        for (std::size_t j = 0; j < design.n_vars(); ++j) {
            eta += (psi[j + 1] + psi[10 + 5 * s + j + 1]) * design.run_value(k, j);
        }
        y[k] = rng.u01() < logistic(eta) ? 1.0 : 0.0;
    }
}

double HierLogisticModel::log_likelihood(std::span<const double> y, std::span<const double> psi,
                                         const Design& design) const {
    double total = 0.0;
    for (std::size_t k = 0; k < design.n_runs(); ++k) {
        const std::size_t s = group_of_run(k, design.n_runs());
        double eta = psi[0] + psi[10 + 5 * s];
        for (std::size_t j = 0; j < design.n_vars(); ++j) {
            eta += (psi[j + 1] + psi[10 + 5 * s + j + 1]) * design.run_value(k, j);
        }
        total += log_bernoulli(y[k], eta);
    }
    return total;
}

void HierLogisticModel::fisher_information(std::span<const double> psi, const Design& design,
                                           RngStream& rng, Matrix& out) const {
    out = hier_logistic_fisher_approx(psi.subspan(0, 5), psi.subspan(5, 5),
                                      LogisticModel::model_matrix(design), groups_,
                                      design.n_runs() / groups_, rng, fisher_mc_size_);
}

} // namespace ace
