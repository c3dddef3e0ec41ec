#include "ace/models/dose_response.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "ace/math.hpp"

namespace ace {

namespace {

constexpr double kClogLogTarget = -0.36651292058166432701;  // log(-log 0.5)

enum class Link { Logit, ClogLog, Probit };

Link link_of(std::size_t u) {
    switch (u) {
        case 1:
        case 2:
            return Link::Logit;
        case 3:
        case 4:
            return Link::ClogLog;
        case 5:
        case 6:
            return Link::Probit;
        default:
            throw std::invalid_argument("dose-response model index must be in 1..6");
    }
}

double inverse_link(Link link, double eta) {
    switch (link) {
        case Link::Logit:
            return logistic(eta);
        case Link::ClogLog: {
            if (eta > 700.0) return 1.0;
            return -std::expm1(-std::exp(eta));
        }
        case Link::Probit:
            return normal_cdf(eta);
    }
    return 0.0;
}

double linear_predictor(std::size_t u, std::span<const double> beta, double dose) {
    double eta = beta[0] + beta[1] * dose;
    if (dose_model_is_second_order(u)) eta += beta[2] * dose * dose;
    return eta;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& field, const char* what) {
    char* end = nullptr;
    const std::string t = trimmed(field);
    const double value = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(value)) {
        throw IngestionError(std::string("posterior file: malformed ") + what + " field '" + field + "'");
    }
    return value;
}

} // namespace

double dose_to_natural_scale(double coded) {
    return kNaturalDoseLo + 0.5 * (coded + 1.0) * (kNaturalDoseHi - kNaturalDoseLo);
}

bool dose_model_is_second_order(std::size_t u) {
    link_of(u);
    return u % 2 == 0;
}

std::size_t dose_model_dim(std::size_t u) {
    return dose_model_is_second_order(u) ? 3 : 2;
}

double dose_response_probability(std::size_t u, std::span<const double> beta, double dose) {
    return inverse_link(link_of(u), linear_predictor(u, beta, dose));
}

double ld50(std::size_t u, std::span<const double> beta) {
    const double w = link_of(u) == Link::ClogLog ? kClogLogTarget : 0.0;
    if (!dose_model_is_second_order(u)) {
        if (beta[1] == 0.0) throw UndefinedLd50Error("ld50: zero slope");
        return (w - beta[0]) / beta[1];
    }
    if (beta[2] == 0.0) throw UndefinedLd50Error("ld50: zero curvature");
    const double disc = beta[1] * beta[1] - 4.0 * beta[2] * (beta[0] - w);
    if (disc < 0.0) throw UndefinedLd50Error("ld50: negative discriminant");
    return (-beta[1] + std::sqrt(disc)) / (2.0 * beta[2]);
}

std::vector<double> dose_response_simulate(std::size_t u, std::span<const double> beta,
                                           std::span<const double> doses, double lambda,
                                           RngStream& rng) {
    std::vector<double> counts(doses.size());
    for (std::size_t k = 0; k < doses.size(); ++k) {
        counts[k] = static_cast<double>(
            rng.poisson(lambda * dose_response_probability(u, beta, doses[k])));
    }
    return counts;
}

double dose_response_log_likelihood(std::span<const double> counts, std::size_t u,
                                    std::span<const double> beta, std::span<const double> doses,
                                    double lambda) {
    double total = 0.0;
    for (std::size_t k = 0; k < doses.size(); ++k) {
        total += log_poisson_pmf(counts[k], lambda * dose_response_probability(u, beta, doses[k]));
    }
    return total;
}

DoseResponsePosterior::DoseResponsePosterior(std::vector<PosteriorSample> samples,
                                             std::array<double, kDoseResponseModels> weights,
                                             double lambda)
    : samples_(std::move(samples)), weights_(weights), lambda_(lambda),
      by_model_(kDoseResponseModels) {
    if (samples_.empty()) throw IngestionError("posterior: no samples");
    if (!(lambda_ > 0.0)) throw IngestionError("posterior: lambda must be positive");
    double sum = 0.0;
    for (double w : weights_) {
        if (w < 0.0) throw IngestionError("posterior: negative model weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw IngestionError("posterior: weights must sum to 1");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const std::size_t u = samples_[i].model;
        if (u < 1 || u > kDoseResponseModels) throw IngestionError("posterior: model index out of range");
        by_model_[u - 1].push_back(i);
    }
    double available = 0.0;
    for (std::size_t u = 0; u < kDoseResponseModels; ++u) {
        draw_weights_[u] = by_model_[u].empty() ? 0.0 : weights_[u];
        available += draw_weights_[u];
    }
    if (!(available > 0.0)) throw IngestionError("posterior: no samples under any weighted model");
    for (double& w : draw_weights_) w /= available;
}

std::size_t DoseResponsePosterior::draw_index(RngStream& rng) const {
    const double target = rng.u01();
    double cumulative = 0.0;
    std::size_t u = 0;
    for (; u < kDoseResponseModels; ++u) {
        cumulative += draw_weights_[u];
        if (target < cumulative) break;
    }
    while (u < kDoseResponseModels && by_model_[u].empty()) ++u;
    if (u == kDoseResponseModels) {
        for (u = kDoseResponseModels; u-- > 0;) {
            if (!by_model_[u].empty()) break;
        }
    }
    const auto& pool = by_model_[u];
    return pool[rng.uniform_index(pool.size())];
}

DoseResponsePosterior::Ld50Moments DoseResponsePosterior::ld50_moments() const {
    // Weighted empirical mixture: model weight spread uniformly over that
    // model's samples.
    Ld50Moments out;
    double weight_total = 0.0;
    std::vector<std::pair<double, double>> weighted;  // (weight, ld50)
    weighted.reserve(samples_.size());
    for (std::size_t u = 0; u < kDoseResponseModels; ++u) {
        if (by_model_[u].empty()) continue;
        const double per_sample = draw_weights_[u] / static_cast<double>(by_model_[u].size());
        for (std::size_t idx : by_model_[u]) {
            try {
                const double value =
                    ld50(samples_[idx].model,
                         std::span<const double>(samples_[idx].beta.data(),
                                                 dose_model_dim(samples_[idx].model)));
                weighted.emplace_back(per_sample, value);
                weight_total += per_sample;
            } catch (const UndefinedLd50Error&) {
                ++out.undefined_samples;
            }
        }
    }
    if (weighted.empty() || !(weight_total > 0.0)) {
        throw UndefinedLd50Error("posterior: LD50 undefined for every sample");
    }
    for (const auto& [w, value] : weighted) out.mean += (w / weight_total) * value;
    for (const auto& [w, value] : weighted) {
        const double d = value - out.mean;
        out.variance += (w / weight_total) * d * d;
    }
    return out;
}

DoseResponsePosterior load_posterior_samples(const std::string& path, double lambda) {
    std::ifstream in(path);
    if (!in) throw IngestionError("posterior file: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IngestionError("posterior file: empty");
    if (trimmed(line) != "u,b0,b1,b2,weight") {
        throw IngestionError("posterior file: header must be 'u,b0,b1,b2,weight'");
    }

    std::vector<PosteriorSample> samples;
    std::array<double, kDoseResponseModels> weights{};
    std::array<bool, kDoseResponseModels> weight_seen{};
    bool any_weight = false;

    while (std::getline(in, line)) {
        if (trimmed(line).empty()) continue;
        auto fields = split_fields(line);
        fields.resize(5);
        const double u_raw = parse_number(fields[0], "u");
        if (u_raw != std::floor(u_raw) || u_raw < 1.0 || u_raw > 6.0) {
            throw IngestionError("posterior file: model index must be an integer in 1..6");
        }
        const auto u = static_cast<std::size_t>(u_raw);
        const bool has_b0 = !trimmed(fields[1]).empty();
        const bool has_weight = !trimmed(fields[4]).empty();
        if (has_b0 && has_weight) {
            throw IngestionError("posterior file: row mixes sample and weight fields");
        }
        if (has_weight) {
            if (weight_seen[u - 1]) throw IngestionError("posterior file: duplicate weight row");
            weights[u - 1] = parse_number(fields[4], "weight");
            weight_seen[u - 1] = true;
            any_weight = true;
            continue;
        }
        PosteriorSample sample;
        sample.model = u;
        sample.beta[0] = parse_number(fields[1], "b0");
        sample.beta[1] = parse_number(fields[2], "b1");
        const bool has_b2 = !trimmed(fields[3]).empty();
        if (dose_model_is_second_order(u)) {
            if (!has_b2) throw IngestionError("posterior file: b2 required for 2nd-order models");
            sample.beta[2] = parse_number(fields[3], "b2");
        } else if (has_b2) {
            throw IngestionError("posterior file: b2 must be empty for 1st-order models");
        }
        samples.push_back(sample);
    }

    if (any_weight) {
        for (std::size_t u = 0; u < kDoseResponseModels; ++u) {
            if (!weight_seen[u]) weights[u] = 0.0;
        }
    } else {
        weights = kReferenceModelWeights;
    }
    return DoseResponsePosterior(std::move(samples), weights, lambda);
}

std::vector<BeetleDoseRecord> load_beetle_doses(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("dose file: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || trimmed(line) != "dose,n,deaths") {
        throw IngestionError("dose file: header must be 'dose,n,deaths'");
    }
    std::vector<BeetleDoseRecord> records;
    while (std::getline(in, line)) {
        if (trimmed(line).empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != 3) throw IngestionError("dose file: expected 3 fields per row");
        BeetleDoseRecord rec;
        rec.dose = parse_number(fields[0], "dose");
        const double n = parse_number(fields[1], "n");
        const double deaths = parse_number(fields[2], "deaths");
        if (n < 0 || deaths < 0 || deaths > n || n != std::floor(n) || deaths != std::floor(deaths)) {
            throw IngestionError("dose file: invalid counts");
        }
        rec.group_size = static_cast<std::size_t>(n);
        rec.deaths = static_cast<std::size_t>(deaths);
        records.push_back(rec);
    }
    return records;
}

} // namespace ace
