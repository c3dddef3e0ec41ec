#include "ace/prior.hpp"

#include <cmath>
#include <stdexcept>

namespace ace {

void PriorSpec::validate() const {
    for (std::size_t i = 0; i < marginals.size(); ++i) {
        const Marginal& m = marginals[i];
        switch (m.kind) {
            case MarginalKind::Uniform:
                if (!std::isfinite(m.p1) || !std::isfinite(m.p2) || !(m.p1 < m.p2)) {
                    throw std::invalid_argument("PriorSpec: uniform requires finite lo < hi");
                }
                break;
            case MarginalKind::Normal:
                if (!std::isfinite(m.p1) || !(m.p2 > 0.0) || !std::isfinite(m.p2)) {
                    throw std::invalid_argument("PriorSpec: normal requires finite mean, var > 0");
                }
                break;
            case MarginalKind::LogNormal:
                if (!std::isfinite(m.p1) || !(m.p2 > 0.0) || !std::isfinite(m.p2)) {
                    throw std::invalid_argument("PriorSpec: log-normal requires finite log-mean, log-var > 0");
                }
                break;
            case MarginalKind::TriangularDecreasing:
                if (!(m.p1 > 0.0) || !std::isfinite(m.p1)) {
                    throw std::invalid_argument("PriorSpec: triangular requires L > 0");
                }
                break;
            case MarginalKind::PointMass:
                if (!std::isfinite(m.p1)) {
                    throw std::invalid_argument("PriorSpec: point mass requires a finite value");
                }
                break;
            case MarginalKind::Poisson:
                if (!(m.p1 > 0.0) || !std::isfinite(m.p1)) {
                    throw std::invalid_argument("PriorSpec: poisson requires rate > 0");
                }
                break;
            case MarginalKind::UniformHalfWidth:
                if (m.parent >= i) {
                    throw std::invalid_argument("PriorSpec: hierarchical parent must be drawn earlier");
                }
                if (marginals[m.parent].kind == MarginalKind::UniformHalfWidth) {
                    throw std::invalid_argument("PriorSpec: nesting depth exceeds one");
                }
                break;
        }
    }
}

void PriorSpec::sample(RngStream& rng, std::span<double> out) const {
    if (out.size() != marginals.size()) {
        throw std::invalid_argument("PriorSpec::sample: output size mismatch");
    }
    for (std::size_t i = 0; i < marginals.size(); ++i) {
        const Marginal& m = marginals[i];
        switch (m.kind) {
            case MarginalKind::Uniform:
                out[i] = rng.uniform(m.p1, m.p2);
                break;
            case MarginalKind::Normal:
                out[i] = rng.normal(m.p1, std::sqrt(m.p2));
                break;
            case MarginalKind::LogNormal:
                out[i] = rng.log_normal(m.p1, m.p2);
                break;
            case MarginalKind::TriangularDecreasing:
                out[i] = rng.triangular_decreasing(m.p1);
                break;
            case MarginalKind::PointMass:
                out[i] = m.p1;
                break;
            case MarginalKind::Poisson:
                out[i] = static_cast<double>(rng.poisson(m.p1));
                break;
            case MarginalKind::UniformHalfWidth: {
                const double half_width = out[m.parent];
                out[i] = rng.uniform(-half_width, half_width);
                break;
            }
        }
    }
}

std::vector<double> sample_prior(const PriorSpec& spec, std::size_t count, RngStream& rng) {
    if (count < 1) throw std::invalid_argument("sample_prior: count must be positive");
    spec.validate();
    std::vector<double> draws(count * spec.dim());
    for (std::size_t l = 0; l < count; ++l) {
        spec.sample(rng, std::span<double>(draws).subspan(l * spec.dim(), spec.dim()));
    }
    return draws;
}

} // namespace ace
