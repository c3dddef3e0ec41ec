#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ace/domain.hpp"
#include "ace/rng.hpp"

namespace ace {

// Six binomial dose-response models: the Cartesian product of three link
// functions and two linear predictors, indexed 1..6.
//
//   1 logit 1st order      2 logit 2nd order
//   3 c-log-log 1st order  4 c-log-log 2nd order
//   5 probit 1st order     6 probit 2nd order
//
// Doses live on the coded scale [-1, 1]; the natural scale is
// [1.6907, 1.8839] and is used for presentation only.
constexpr std::size_t kDoseResponseModels = 6;

/// Reference posterior model probabilities for the beetle mortality study.
constexpr std::array<double, kDoseResponseModels> kReferenceModelWeights = {
    0.0216, 0.0686, 0.7580, 0.0612, 0.0304, 0.0602};

constexpr double kNaturalDoseLo = 1.6907;
constexpr double kNaturalDoseHi = 1.8839;

/// Coded dose in [-1,1] mapped to the natural scale.
double dose_to_natural_scale(double coded);

bool dose_model_is_second_order(std::size_t u);

/// Number of regression parameters of model u (2 or 3).
std::size_t dose_model_dim(std::size_t u);

/// Death probability of model u at a coded dose.
double dose_response_probability(std::size_t u, std::span<const double> beta, double dose);

struct UndefinedLd50Error : std::domain_error {
    using std::domain_error::domain_error;
};

/// Dose at which the death probability is 0.5 under model u; throws
/// UndefinedLd50Error when the defining equation has no usable root
/// (zero slope, zero curvature, or negative discriminant).
double ld50(std::size_t u, std::span<const double> beta);

/// Group deaths y_k ~ Poisson(lambda * rho_k) at the given coded doses.
std::vector<double> dose_response_simulate(std::size_t u, std::span<const double> beta,
                                           std::span<const double> doses, double lambda,
                                           RngStream& rng);

/// Joint log pmf of the observed counts under model u.
double dose_response_log_likelihood(std::span<const double> counts, std::size_t u,
                                    std::span<const double> beta, std::span<const double> doses,
                                    double lambda);

struct IngestionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PosteriorSample {
    std::size_t model = 1;                    // u in 1..6
    std::array<double, 3> beta = {0, 0, 0};   // beta[2] unused for 1st order
};

// Posterior sample of (model index, regression parameters) plus posterior
// model probabilities; the importance proposal for the model-averaged
// LD50 utility.
class DoseResponsePosterior {
public:
    DoseResponsePosterior(std::vector<PosteriorSample> samples,
                          std::array<double, kDoseResponseModels> weights, double lambda = 60.0);

    const std::vector<PosteriorSample>& samples() const { return samples_; }
    const std::array<double, kDoseResponseModels>& weights() const { return weights_; }
    double lambda() const { return lambda_; }

    /// Index of a sample drawn from the weighted posterior: model by weight
    /// (renormalized over models that carry samples), then uniformly within
    /// the model.
    std::size_t draw_index(RngStream& rng) const;

    /// Exact LD50 mean and variance under the weighted empirical posterior;
    /// samples with undefined LD50 are excluded (their count is reported).
    struct Ld50Moments {
        double mean = 0.0;
        double variance = 0.0;
        std::size_t undefined_samples = 0;
    };
    Ld50Moments ld50_moments() const;

private:
    std::vector<PosteriorSample> samples_;
    std::array<double, kDoseResponseModels> weights_;
    double lambda_;
    std::vector<std::vector<std::size_t>> by_model_;
    std::array<double, kDoseResponseModels> draw_weights_;  // renormalized
};

/// Parse a posterior-sample CSV with header `u,b0,b1,b2,weight`. Sample rows
/// carry u, b0, b1 and (for 2nd-order models) b2; weight rows carry u and
/// weight only. When no weight rows appear the reference weights above are
/// used. Malformed rows, partial weight sets, negative weights, or weights
/// not summing to 1 within 1e-6 raise IngestionError.
DoseResponsePosterior load_posterior_samples(const std::string& path, double lambda = 60.0);

struct BeetleDoseRecord {
    double dose = 0.0;
    std::size_t group_size = 0;
    std::size_t deaths = 0;
};

/// Parse a dose-data CSV with header `dose,n,deaths`.
std::vector<BeetleDoseRecord> load_beetle_doses(const std::string& path);

} // namespace ace
