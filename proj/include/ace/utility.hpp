#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "ace/domain.hpp"
#include "ace/model.hpp"
#include "ace/models/dose_response.hpp"
#include "ace/rng.hpp"

namespace ace {

struct DegenerateWeightError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularInformationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One Monte Carlo approximation of the expected utility: the per-sample
// realizations u(delta, y_l, psi_l) and their arithmetic mean.
struct UtilitySampleBatch {
    std::vector<double> values;
    double mean = 0.0;
    std::size_t rejected_draws = 0;  // parameter draws discarded (singular
                                     // information / undefined LD50)

    std::size_t size() const noexcept { return values.size(); }

    /// Sample variance of the values (divisor B-1).
    double sample_variance() const;

    static UtilitySampleBatch from_values(std::vector<double> values,
                                          std::size_t rejected_draws = 0);
};

struct NestedMcConfig {
    std::size_t outer = 20000;  // B
    std::size_t inner = 20000;  // B-tilde

    void validate() const {
        if (outer < 2) throw std::invalid_argument("NestedMcConfig: outer size must be >= 2");
        if (inner < 1) throw std::invalid_argument("NestedMcConfig: inner size must be >= 1");
    }
};

/// Shannon information gain, nested Monte Carlo: per outer sample
/// log pi~(y_l | theta_l, delta) - log pi~(y_l | delta), each marginal a
/// log-sum-exp average of the likelihood over a fresh inner prior sample
/// (over the nuisance block holding theta_l, and over the full parameter
/// vector, respectively).
UtilitySampleBatch sig_nested(const Model& model, const Design& design, NestedMcConfig cfg,
                              RngStream& rng);

/// Negative squared error loss, nested Monte Carlo: per outer sample
/// -sum_w (theta_lw - E~(theta_w | y_l))^2 where E~ is the self-normalized
/// importance-sampling posterior mean over a fresh inner prior sample.
UtilitySampleBatch nsel_nested(const Model& model, const Design& design, NestedMcConfig cfg,
                               RngStream& rng);

/// Pseudo-Bayesian D: per sample log det I(theta_l; delta, gamma_l).
/// Singular information triggers reject-and-resample of the parameter draw
/// (at most 100 attempts, then SingularInformationError).
UtilitySampleBatch pseudo_bayes_d(const Model& model, const Design& design, std::size_t outer,
                                  RngStream& rng);

/// Pseudo-Bayesian A: per sample -tr I^{-1} (negated so that every utility
/// is maximized).
UtilitySampleBatch pseudo_bayes_a(const Model& model, const Design& design, std::size_t outer,
                                  RngStream& rng);

/// 100 * exp{ [phi^S(d1) - phi^S(d2)] / p } with a shared prior sample for
/// both designs.
double d_efficiency(const Design& d1, const Design& d2, const Model& model, std::size_t p,
                    std::size_t outer, RngStream& rng);

/// Model-averaged NSEL for LD50: the outer loop draws (u_l, beta_l) from the
/// weighted posterior sample and simulates follow-up counts; the inner
/// importance proposal is one fixed posterior sample reused across outer
/// iterations. An empty design short-circuits to the exact negative LD50
/// variance of the ingested posterior sample.
UtilitySampleBatch nsel_ld50_model_averaged(const DoseResponsePosterior& posterior,
                                            const Design& design, NestedMcConfig cfg,
                                            RngStream& rng);

// Expected-utility estimator as consumed by the ACE loop: one batch of B
// utility realizations at a design. Nested estimators tie the inner size to
// B unless overridden.
class UtilityEstimator {
public:
    virtual ~UtilityEstimator() = default;
    virtual UtilitySampleBatch evaluate(const Design& design, std::size_t outer,
                                        RngStream& rng) const = 0;
};

enum class UtilityKind { Sig, Nsel, PseudoD, PseudoA, NselLd50 };

/// Estimator over a likelihood-based model; `inner_override`, when positive,
/// fixes the nested inner sample size instead of matching B.
std::unique_ptr<UtilityEstimator> make_model_utility(UtilityKind kind, const Model& model,
                                                     std::size_t inner_override = 0);

std::unique_ptr<UtilityEstimator> make_ld50_utility(const DoseResponsePosterior& posterior,
                                                    std::size_t inner_override = 0);

/// Evaluate the inner estimator at a transformed design (e.g. Beta-DRS shape
/// parameters expanded to sampling times). The transform runs once per batch.
std::unique_ptr<UtilityEstimator> make_transformed_utility(
    std::unique_ptr<UtilityEstimator> inner, std::function<Design(const Design&)> transform);

} // namespace ace
