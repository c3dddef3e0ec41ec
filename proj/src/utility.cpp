#include "ace/utility.hpp"

#include <cmath>
#include <limits>

#include "ace/math.hpp"

namespace ace {

namespace {

constexpr std::size_t kMaxSingularRetries = 100;

double finalize_mean(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

// Draw psi until the Fisher information at `design` admits a Cholesky
// factorization; counts and bounds the rejected draws.
void sample_with_valid_information(const Model& model, const Design& design, RngStream& rng,
                                   std::span<double> psi, Matrix& info, Matrix& lower,
                                   std::size_t& rejected) {
    for (std::size_t attempt = 0; attempt < kMaxSingularRetries; ++attempt) {
        model.sample_params(rng, psi);
        model.fisher_information(psi, design, rng, info);
        if (cholesky_factor(info, lower)) return;
        ++rejected;
    }
    throw SingularInformationError(
        "pseudo-Bayesian utility: information matrix singular for 100 consecutive prior draws");
}

class ModelUtility final : public UtilityEstimator {
public:
    ModelUtility(UtilityKind kind, const Model& model, std::size_t inner_override)
        : kind_(kind), model_(model), inner_override_(inner_override) {}

    UtilitySampleBatch evaluate(const Design& design, std::size_t outer,
                                RngStream& rng) const override {
        const std::size_t inner = inner_override_ > 0 ? inner_override_ : outer;
        switch (kind_) {
            case UtilityKind::Sig:
                return sig_nested(model_, design, {outer, inner}, rng);
            case UtilityKind::Nsel:
                return nsel_nested(model_, design, {outer, inner}, rng);
            case UtilityKind::PseudoD:
                return pseudo_bayes_d(model_, design, outer, rng);
            case UtilityKind::PseudoA:
                return pseudo_bayes_a(model_, design, outer, rng);
            case UtilityKind::NselLd50:
                break;
        }
        throw std::invalid_argument("ModelUtility: utility kind requires a posterior sample");
    }

private:
    UtilityKind kind_;
    const Model& model_;
    std::size_t inner_override_;
};

class Ld50Utility final : public UtilityEstimator {
public:
    Ld50Utility(const DoseResponsePosterior& posterior, std::size_t inner_override)
        : posterior_(posterior), inner_override_(inner_override) {}

    UtilitySampleBatch evaluate(const Design& design, std::size_t outer,
                                RngStream& rng) const override {
        const std::size_t inner = inner_override_ > 0 ? inner_override_ : outer;
        return nsel_ld50_model_averaged(posterior_, design, {outer, inner}, rng);
    }

private:
    const DoseResponsePosterior& posterior_;
    std::size_t inner_override_;
};

class TransformedUtility final : public UtilityEstimator {
public:
    TransformedUtility(std::unique_ptr<UtilityEstimator> inner,
                       std::function<Design(const Design&)> transform)
        : inner_(std::move(inner)), transform_(std::move(transform)) {}

    UtilitySampleBatch evaluate(const Design& design, std::size_t outer,
                                RngStream& rng) const override {
        return inner_->evaluate(transform_(design), outer, rng);
    }

private:
    std::unique_ptr<UtilityEstimator> inner_;
    std::function<Design(const Design&)> transform_;
};

} // namespace

double UtilitySampleBatch::sample_variance() const {
    if (values.size() < 2) return 0.0;
    double ss = 0.0;
    for (double v : values) {
        const double d = v - mean;
        ss += d * d;
    }
    return ss / static_cast<double>(values.size() - 1);
}

UtilitySampleBatch UtilitySampleBatch::from_values(std::vector<double> values,
                                                   std::size_t rejected_draws) {
    UtilitySampleBatch batch;
    batch.values = std::move(values);
    batch.rejected_draws = rejected_draws;
    batch.mean = finalize_mean(batch.values);
    return batch;
}

UtilitySampleBatch sig_nested(const Model& model, const Design& design, NestedMcConfig cfg,
                              RngStream& rng) {
    cfg.validate();
    const std::size_t dim = model.param_dim();
    const bool has_nuisance = model.nuisance_dim() > 0;
    const double log_inner = std::log(static_cast<double>(cfg.inner));

    std::vector<double> psi(dim);
    std::vector<double> psi_inner(dim);
    std::vector<double> y;
    std::vector<double> log_liks(cfg.inner);
    std::vector<double> values;
    values.reserve(cfg.outer);

    for (std::size_t l = 0; l < cfg.outer; ++l) {
        model.sample_params(rng, psi);
        model.simulate(psi, design, rng, y);

        double log_conditional;
        if (has_nuisance) {
            psi_inner = psi;
            for (std::size_t b = 0; b < cfg.inner; ++b) {
                model.resample_nuisance(rng, psi_inner);
                log_liks[b] = model.log_likelihood(y, psi_inner, design);
            }
            log_conditional = log_sum_exp(log_liks) - log_inner;
        } else {
            log_conditional = model.log_likelihood(y, psi, design);
        }

        for (std::size_t b = 0; b < cfg.inner; ++b) {
            model.sample_params(rng, psi_inner);
            log_liks[b] = model.log_likelihood(y, psi_inner, design);
        }
        const double log_marginal = log_sum_exp(log_liks) - log_inner;

        if (!std::isfinite(log_conditional) || !std::isfinite(log_marginal)) {
            throw DegenerateWeightError("sig_nested: inner likelihood average underflowed");
        }
        values.push_back(log_conditional - log_marginal);
    }
    return UtilitySampleBatch::from_values(std::move(values));
}

UtilitySampleBatch nsel_nested(const Model& model, const Design& design, NestedMcConfig cfg,
                               RngStream& rng) {
    cfg.validate();
    const std::size_t dim = model.param_dim();
    const std::size_t p = model.interest_dim();

    std::vector<double> psi(dim);
    std::vector<double> psi_inner(dim);
    std::vector<double> y;
    std::vector<double> log_weights(cfg.inner);
    std::vector<double> inner_theta(cfg.inner * p);
    std::vector<double> posterior_mean(p);
    std::vector<double> values;
    values.reserve(cfg.outer);

    for (std::size_t l = 0; l < cfg.outer; ++l) {
        model.sample_params(rng, psi);
        model.simulate(psi, design, rng, y);

        for (std::size_t b = 0; b < cfg.inner; ++b) {
            model.sample_params(rng, psi_inner);
            log_weights[b] = model.log_likelihood(y, psi_inner, design);
            for (std::size_t w = 0; w < p; ++w) inner_theta[b * p + w] = psi_inner[w];
        }
        const double log_total = log_sum_exp(log_weights);
        if (!std::isfinite(log_total)) {
            throw DegenerateWeightError("nsel_nested: importance weights underflowed");
        }
        std::fill(posterior_mean.begin(), posterior_mean.end(), 0.0);
        for (std::size_t b = 0; b < cfg.inner; ++b) {
            const double weight = std::exp(log_weights[b] - log_total);
            for (std::size_t w = 0; w < p; ++w) posterior_mean[w] += weight * inner_theta[b * p + w];
        }
        double loss = 0.0;
        for (std::size_t w = 0; w < p; ++w) {
            const double d = psi[w] - posterior_mean[w];
            loss += d * d;
        }
        values.push_back(-loss);
    }
    return UtilitySampleBatch::from_values(std::move(values));
}

UtilitySampleBatch pseudo_bayes_d(const Model& model, const Design& design, std::size_t outer,
                                  RngStream& rng) {
    if (outer < 1) throw std::invalid_argument("pseudo_bayes_d: outer size must be positive");
    if (!model.has_fisher_information()) {
        throw std::invalid_argument("pseudo_bayes_d: model provides no Fisher information");
    }
    std::vector<double> psi(model.param_dim());
    Matrix info;
    Matrix lower;
    std::size_t rejected = 0;
    std::vector<double> values;
    values.reserve(outer);
    for (std::size_t l = 0; l < outer; ++l) {
        sample_with_valid_information(model, design, rng, psi, info, lower, rejected);
        values.push_back(cholesky_log_det(lower));
    }
    return UtilitySampleBatch::from_values(std::move(values), rejected);
}

UtilitySampleBatch pseudo_bayes_a(const Model& model, const Design& design, std::size_t outer,
                                  RngStream& rng) {
    if (outer < 1) throw std::invalid_argument("pseudo_bayes_a: outer size must be positive");
    if (!model.has_fisher_information()) {
        throw std::invalid_argument("pseudo_bayes_a: model provides no Fisher information");
    }
    std::vector<double> psi(model.param_dim());
    Matrix info;
    Matrix lower;
    std::size_t rejected = 0;
    std::vector<double> values;
    values.reserve(outer);
    for (std::size_t l = 0; l < outer; ++l) {
        sample_with_valid_information(model, design, rng, psi, info, lower, rejected);
        values.push_back(-cholesky_inverse_trace(lower));
    }
    return UtilitySampleBatch::from_values(std::move(values), rejected);
}

double d_efficiency(const Design& d1, const Design& d2, const Model& model, std::size_t p,
                    std::size_t outer, RngStream& rng) {
    if (outer < 1) throw std::invalid_argument("d_efficiency: outer size must be positive");
    if (p < 1) throw std::invalid_argument("d_efficiency: p must be positive");
    std::vector<double> psi(model.param_dim());
    Matrix info;
    Matrix lower;
    double sum1 = 0.0;
    double sum2 = 0.0;
    for (std::size_t l = 0; l < outer; ++l) {
        // One shared prior draw per iteration; retried when either design
        // yields a singular information matrix.
        double log_det1 = 0.0;
        double log_det2 = 0.0;
        bool ok = false;
        for (std::size_t attempt = 0; attempt < kMaxSingularRetries; ++attempt) {
            model.sample_params(rng, psi);
            model.fisher_information(psi, d1, rng, info);
            if (!cholesky_factor(info, lower)) continue;
            log_det1 = cholesky_log_det(lower);
            model.fisher_information(psi, d2, rng, info);
            if (!cholesky_factor(info, lower)) continue;
            log_det2 = cholesky_log_det(lower);
            ok = true;
            break;
        }
        if (!ok) {
            throw SingularInformationError("d_efficiency: singular information for 100 draws");
        }
        sum1 += log_det1;
        sum2 += log_det2;
    }
    const double b = static_cast<double>(outer);
    return 100.0 * std::exp((sum1 / b - sum2 / b) / static_cast<double>(p));
}

UtilitySampleBatch nsel_ld50_model_averaged(const DoseResponsePosterior& posterior,
                                            const Design& design, NestedMcConfig cfg,
                                            RngStream& rng) {
    const auto& samples = posterior.samples();
    const double lambda = posterior.lambda();

    if (design.q() == 0) {
        // No data: the expected posterior variance equals the current
        // posterior variance, computable exactly from the sample.
        const auto moments = posterior.ld50_moments();
        return UtilitySampleBatch::from_values({-moments.variance}, moments.undefined_samples);
    }
    cfg.validate();

    std::vector<double> doses(design.coords().begin(), design.coords().end());
    std::size_t rejected = 0;

    const auto draw_defined = [&](double& ld_value) -> const PosteriorSample& {
        for (std::size_t attempt = 0; attempt < kMaxSingularRetries; ++attempt) {
            const PosteriorSample& s = samples[posterior.draw_index(rng)];
            try {
                ld_value = ld50(s.model, std::span<const double>(s.beta.data(),
                                                                 dose_model_dim(s.model)));
                return s;
            } catch (const UndefinedLd50Error&) {
                ++rejected;
            }
        }
        throw UndefinedLd50Error("nsel_ld50: LD50 undefined for 100 consecutive posterior draws");
    };

    // Fixed inner proposal, reused across outer iterations: per inner draw,
    // the LD50 value and the Poisson means at each dose.
    std::vector<double> inner_ld(cfg.inner);
    std::vector<double> inner_mean(cfg.inner * doses.size());
    for (std::size_t b = 0; b < cfg.inner; ++b) {
        const PosteriorSample& s = draw_defined(inner_ld[b]);
        const std::span<const double> beta(s.beta.data(), dose_model_dim(s.model));
        for (std::size_t k = 0; k < doses.size(); ++k) {
            inner_mean[b * doses.size() + k] =
                lambda * dose_response_probability(s.model, beta, doses[k]);
        }
    }

    std::vector<double> log_weights(cfg.inner);
    std::vector<double> values;
    values.reserve(cfg.outer);
    for (std::size_t l = 0; l < cfg.outer; ++l) {
        double ld_outer = 0.0;
        const PosteriorSample& s = draw_defined(ld_outer);
        const std::span<const double> beta(s.beta.data(), dose_model_dim(s.model));
        const auto counts = dose_response_simulate(s.model, beta, doses, lambda, rng);

        for (std::size_t b = 0; b < cfg.inner; ++b) {
            double log_w = 0.0;
            for (std::size_t k = 0; k < doses.size(); ++k) {
                log_w += log_poisson_pmf(counts[k], inner_mean[b * doses.size() + k]);
            }
            log_weights[b] = log_w;
        }
        const double log_total = log_sum_exp(log_weights);
        if (!std::isfinite(log_total)) {
            throw DegenerateWeightError("nsel_ld50: importance weights underflowed");
        }
        double posterior_ld = 0.0;
        for (std::size_t b = 0; b < cfg.inner; ++b) {
            posterior_ld += std::exp(log_weights[b] - log_total) * inner_ld[b];
        }
        const double d = ld_outer - posterior_ld;
        values.push_back(-d * d);
    }
    return UtilitySampleBatch::from_values(std::move(values), rejected);
}

std::unique_ptr<UtilityEstimator> make_model_utility(UtilityKind kind, const Model& model,
                                                     std::size_t inner_override) {
    return std::make_unique<ModelUtility>(kind, model, inner_override);
}

std::unique_ptr<UtilityEstimator> make_ld50_utility(const DoseResponsePosterior& posterior,
                                                    std::size_t inner_override) {
    return std::make_unique<Ld50Utility>(posterior, inner_override);
}

std::unique_ptr<UtilityEstimator> make_transformed_utility(
    std::unique_ptr<UtilityEstimator> inner, std::function<Design(const Design&)> transform) {
    return std::make_unique<TransformedUtility>(std::move(inner), std::move(transform));
}

} // namespace ace
