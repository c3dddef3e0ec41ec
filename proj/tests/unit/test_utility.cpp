#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "ace/models/logistic.hpp"
#include "ace/models/poisson_toy.hpp"
#include "ace/utility.hpp"
#include "../support/normal_normal.hpp"

using namespace ace;
using ace::testing::NormalNormalModel;
using ace::testing::unit_design;

namespace {

double batch_se(const UtilitySampleBatch& batch) {
    return std::sqrt(batch.sample_variance() / static_cast<double>(batch.size()));
}

// A model whose data is impossible under every parameter value; drives the
// degenerate-weight error path.
class ImpossibleModel final : public Model {
public:
    std::string_view name() const override { return "impossible"; }
    std::size_t param_dim() const override { return 1; }
    std::size_t interest_dim() const override { return 1; }
    void sample_params(RngStream&, std::span<double> psi) const override { psi[0] = 0.0; }
    void simulate(std::span<const double>, const Design& design, RngStream&,
                  std::vector<double>& y) const override {
        y.assign(design.n_runs(), 0.0);
    }
    double log_likelihood(std::span<const double>, std::span<const double>,
                          const Design&) const override {
        return -std::numeric_limits<double>::infinity();
    }
};

std::string write_posterior(const char* name, const std::string& body) {
    std::string path = std::string("/tmp/ace_test_") + name + ".csv";
    std::ofstream out(path);
    out << "u,b0,b1,b2,weight\n" << body;
    return path;
}

} // namespace

TEST_CASE("batch mean equals the arithmetic average and survives permutation") {
    RngStream rng(1, 0);
    std::vector<double> values(1000);
    for (auto& v : values) v = rng.uniform(-5.0, 5.0);
    const auto batch = UtilitySampleBatch::from_values(values);
    double avg = 0.0;
    for (double v : values) avg += v;
    avg /= static_cast<double>(values.size());
    CHECK(std::abs(batch.mean - avg) < 1e-12);

    // Permuting the outer sample permutes values but preserves the mean.
    std::vector<double> permuted = values;
    for (std::size_t i = permuted.size(); i > 1; --i) {
        std::swap(permuted[i - 1], permuted[rng.uniform_index(i)]);
    }
    const auto batch2 = UtilitySampleBatch::from_values(permuted);
    CHECK(batch2.mean == doctest::Approx(batch.mean).epsilon(1e-12));
}

TEST_CASE("SIG nested estimator against the conjugate closed form") {
    NormalNormalModel model;
    RngStream rng(101, 0);
    const auto batch = sig_nested(model, unit_design(1), {2000, 2000}, rng);
    // 0.5 log 2 = 0.346574; inner bias is O(1/B~).
    CHECK(std::abs(batch.mean - model.expected_sig(1)) < 3.0 * batch_se(batch) + 0.005);

    SUBCASE("point-mass prior yields exactly zero values") {
        class PointPriorModel final : public Model {
        public:
            std::string_view name() const override { return "point_normal"; }
            std::size_t param_dim() const override { return 1; }
            std::size_t interest_dim() const override { return 1; }
            void sample_params(RngStream&, std::span<double> psi) const override { psi[0] = 1.5; }
            void simulate(std::span<const double> psi, const Design& design, RngStream& rng,
                          std::vector<double>& y) const override {
                y.resize(design.n_runs());
                for (auto& value : y) value = rng.normal(psi[0], 1.0);
            }
            double log_likelihood(std::span<const double> y, std::span<const double> psi,
                                  const Design&) const override {
                double total = 0.0;
                for (double value : y) total += -0.5 * (value - psi[0]) * (value - psi[0]);
                return total;
            }
        };
        PointPriorModel point;
        RngStream rng2(102, 0);
        const auto zero_batch = sig_nested(point, unit_design(2), {50, 40}, rng2);
        // Zero up to a last-ulp cancellation in the log-sum-exp path.
        for (double v : zero_batch.values) CHECK(std::abs(v) < 1e-12);
    }
}

TEST_CASE("NSEL nested estimator against the conjugate closed form") {
    NormalNormalModel model;
    RngStream rng(103, 0);
    const auto batch = nsel_nested(model, unit_design(3), {2000, 2000}, rng);
    // -1/(1+3) = -0.25.
    CHECK(std::abs(batch.mean - model.expected_nsel(3)) < 3.0 * batch_se(batch) + 0.01);

    SUBCASE("point-mass prior collapses the loss to zero") {
        class PointModel final : public Model {
        public:
            std::string_view name() const override { return "point_normal"; }
            std::size_t param_dim() const override { return 1; }
            std::size_t interest_dim() const override { return 1; }
            void sample_params(RngStream&, std::span<double> psi) const override { psi[0] = 2.0; }
            void simulate(std::span<const double> psi, const Design& design, RngStream& rng,
                          std::vector<double>& y) const override {
                y.resize(design.n_runs());
                for (auto& value : y) value = rng.normal(psi[0], 1.0);
            }
            double log_likelihood(std::span<const double> y, std::span<const double> psi,
                                  const Design&) const override {
                double total = 0.0;
                for (double value : y) total += -0.5 * (value - psi[0]) * (value - psi[0]);
                return total;
            }
        };
        PointModel point;
        RngStream rng2(1040, 0);
        const auto zero_batch = nsel_nested(point, unit_design(2), {100, 50}, rng2);
        for (double v : zero_batch.values) CHECK(std::abs(v) < 1e-12);
    }
    SUBCASE("inner size one returns the single draw as posterior mean") {
        RngStream a(104, 0);
        RngStream b(104, 0);
        // With inner = 1 the self-normalized weight is 1 regardless of the
        // likelihood, so the estimate is finite and well-defined.
        const auto tiny = nsel_nested(model, unit_design(1), {10, 1}, a);
        CHECK(tiny.size() == 10);
        for (double v : tiny.values) CHECK(v <= 0.0);
        (void)b;
    }
}

TEST_CASE("degenerate inner weights raise the dedicated error") {
    ImpossibleModel model;
    RngStream rng(105, 0);
    CHECK_THROWS_AS((void)sig_nested(model, unit_design(1), {5, 5}, rng), DegenerateWeightError);
    CHECK_THROWS_AS((void)nsel_nested(model, unit_design(1), {5, 5}, rng), DegenerateWeightError);
}

TEST_CASE("pseudo-Bayesian D on the Poisson toy") {
    const Design x1(1, 1, {1.0});
    SUBCASE("point prior has zero Monte Carlo variance") {
        PoissonToyModel model(Marginal::point_mass(0.5));
        RngStream rng(106, 0);
        const auto batch = pseudo_bayes_d(model, x1, 200, rng);
        CHECK(batch.sample_variance() < 1e-24);
        CHECK(batch.mean == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("normal prior mean matches 2 log|x| + 0.5 x") {
        PoissonToyModel model;
        RngStream rng(107, 0);
        for (double x : {1.0, 0.5, -0.8}) {
            const Design design(1, 1, {x});
            const auto batch = pseudo_bayes_d(model, design, 20000, rng);
            const double expected = 2.0 * std::log(std::abs(x)) + 0.5 * x;
            CHECK(std::abs(batch.mean - expected) < 3.0 * batch_se(batch));
        }
    }
    SUBCASE("unbiasedness: replicated batch means match a large reference") {
        PoissonToyModel model;
        RngStream rng(108, 0);
        const auto reference = pseudo_bayes_d(model, x1, 1000000, rng);
        double grand = 0.0;
        const int reps = 200;
        const std::size_t b = 1000;
        for (int r = 0; r < reps; ++r) grand += pseudo_bayes_d(model, x1, b, rng).mean;
        grand /= reps;
        // SE of the grand mean: sd(values)/sqrt(reps * b); sd = |x| = 1.
        const double se = 1.0 / std::sqrt(static_cast<double>(reps) * static_cast<double>(b));
        const double ref_se = 1.0 / std::sqrt(1e6);
        CHECK(std::abs(grand - reference.mean) < 3.0 * std::sqrt(se * se + ref_se * ref_se));
    }
}

TEST_CASE("singular information draws are rejected, counted, and resampled") {
    // Information is singular whenever the sampled parameter is negative,
    // which happens for roughly a third of N(0.5, 1) draws.
    class HalfSingularModel final : public Model {
    public:
        std::string_view name() const override { return "half_singular"; }
        std::size_t param_dim() const override { return 1; }
        std::size_t interest_dim() const override { return 1; }
        void sample_params(RngStream& rng, std::span<double> psi) const override {
            psi[0] = rng.normal(0.5, 1.0);
        }
        void simulate(std::span<const double>, const Design& design, RngStream&,
                      std::vector<double>& y) const override {
            y.assign(design.n_runs(), 0.0);
        }
        double log_likelihood(std::span<const double>, std::span<const double>,
                              const Design&) const override {
            return 0.0;
        }
        bool has_fisher_information() const override { return true; }
        void fisher_information(std::span<const double> psi, const Design&, RngStream&,
                                Matrix& out) const override {
            out.resize(1, 1);
            out(0, 0) = psi[0] > 0.0 ? psi[0] : 0.0;
        }
    };
    HalfSingularModel model;
    RngStream rng(120, 0);
    const auto batch = pseudo_bayes_d(model, Design(1, 1, {0.5}), 2000, rng);
    CHECK(batch.size() == 2000);
    CHECK(batch.rejected_draws > 200);
    for (double v : batch.values) CHECK(std::isfinite(v));

    // A model whose information is always singular exhausts the retry budget.
    class SingularModel final : public Model {
    public:
        std::string_view name() const override { return "singular"; }
        std::size_t param_dim() const override { return 1; }
        std::size_t interest_dim() const override { return 1; }
        void sample_params(RngStream&, std::span<double> psi) const override { psi[0] = 1.0; }
        void simulate(std::span<const double>, const Design& design, RngStream&,
                      std::vector<double>& y) const override {
            y.assign(design.n_runs(), 0.0);
        }
        double log_likelihood(std::span<const double>, std::span<const double>,
                              const Design&) const override {
            return 0.0;
        }
        bool has_fisher_information() const override { return true; }
        void fisher_information(std::span<const double>, const Design&, RngStream&,
                                Matrix& out) const override {
            out.resize(1, 1);
            out(0, 0) = 0.0;
        }
    };
    SingularModel always;
    CHECK_THROWS_AS((void)pseudo_bayes_d(always, Design(1, 1, {0.5}), 10, rng),
                    SingularInformationError);
}

TEST_CASE("nested configuration validation") {
    NormalNormalModel model;
    RngStream rng(121, 0);
    CHECK_THROWS_AS((void)sig_nested(model, unit_design(1), {1, 10}, rng), std::invalid_argument);
    CHECK_THROWS_AS((void)nsel_nested(model, unit_design(1), {10, 0}, rng), std::invalid_argument);
}

TEST_CASE("pseudo-Bayesian A on the Poisson toy") {
    PoissonToyModel model(Marginal::point_mass(0.5));
    RngStream rng(109, 0);
    SUBCASE("scalar inverse at the point prior") {
        const auto batch = pseudo_bayes_a(model, Design(1, 1, {1.0}), 50, rng);
        CHECK(batch.mean == doctest::Approx(-std::exp(-0.5)).epsilon(1e-12));
        CHECK(batch.sample_variance() < 1e-24);
    }
    SUBCASE("doubling a design halves the trace of the inverse") {
        const auto single = pseudo_bayes_a(model, Design(1, 1, {1.0}), 10, rng);
        const auto doubled = pseudo_bayes_a(model, Design(2, 1, {1.0, 1.0}), 10, rng);
        CHECK(doubled.mean == doctest::Approx(0.5 * single.mean).epsilon(1e-12));
    }
}

TEST_CASE("replicating a homogeneous logistic design shifts log det by p log 2") {
    LogisticModel model;
    RngStream rng(110, 0);
    std::vector<double> coords(6 * 4);
    for (auto& c : coords) c = rng.uniform(-1.0, 1.0);
    const Design base(6, 4, coords);
    std::vector<double> doubled_coords(12 * 4);
    for (std::size_t j = 0; j < 4; ++j) {
        for (std::size_t k = 0; k < 6; ++k) {
            doubled_coords[j * 12 + k] = coords[j * 6 + k];
            doubled_coords[j * 12 + 6 + k] = coords[j * 6 + k];
        }
    }
    const Design doubled(12, 4, doubled_coords);

    // Shared prior draws make the determinant shift exact: Eff_D = 200.
    RngStream shared(111, 0);
    CHECK(d_efficiency(doubled, base, model, 5, 200, shared) == doctest::Approx(200.0).epsilon(1e-9));
    RngStream shared2(111, 0);
    CHECK(d_efficiency(base, doubled, model, 5, 200, shared2) == doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("D-efficiency identities") {
    LogisticModel model;
    RngStream rng(112, 0);
    std::vector<double> coords(8 * 4);
    for (auto& c : coords) c = rng.uniform(-1.0, 1.0);
    const Design d1(8, 4, coords);
    for (auto& c : coords) c = rng.uniform(-1.0, 1.0);
    const Design d2(8, 4, coords);

    RngStream shared(113, 5);
    CHECK(d_efficiency(d1, d1, model, 5, 100, shared) == doctest::Approx(100.0).epsilon(1e-12));

    RngStream sa(114, 0);
    RngStream sb(114, 0);
    const double forward = d_efficiency(d1, d2, model, 5, 100, sa);
    const double backward = d_efficiency(d2, d1, model, 5, 100, sb);
    CHECK(forward * backward == doctest::Approx(10000.0).epsilon(1e-9));
}

TEST_CASE("Monte Carlo standard error scales as B^{-1/2}") {
    PoissonToyModel model;
    const Design design(1, 1, {0.7});
    RngStream rng(115, 0);
    const std::size_t sizes[] = {100, 1000, 10000};
    double log_sd[3];
    for (int s = 0; s < 3; ++s) {
        double sum = 0.0;
        double sum_sq = 0.0;
        const int reps = 50;
        for (int r = 0; r < reps; ++r) {
            const double mean = pseudo_bayes_d(model, design, sizes[s], rng).mean;
            sum += mean;
            sum_sq += mean * mean;
        }
        const double mean_of_means = sum / reps;
        log_sd[s] = 0.5 * std::log(sum_sq / reps - mean_of_means * mean_of_means);
    }
    const double slope = (log_sd[2] - log_sd[0]) / (std::log(10000.0) - std::log(100.0));
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.2));
}

TEST_CASE("model-averaged LD50 utility") {
    SUBCASE("collapsed posterior gives identically zero values") {
        const auto path = write_posterior("collapsed", "1,0.35,2.0,,\n");
        const auto posterior = load_posterior_samples(path);
        RngStream rng(116, 0);
        const auto batch =
            nsel_ld50_model_averaged(posterior, Design(2, 1, {-0.2, 0.4}), {200, 100}, rng);
        for (double v : batch.values) CHECK(std::abs(v) < 1e-12);
    }
    SUBCASE("empty design returns the exact negative posterior variance") {
        const auto path = write_posterior(
            "threepoint", "1,-78.0,2.0,,\n1,-80.0,2.0,,\n1,-82.0,2.0,,\n");
        const auto posterior = load_posterior_samples(path);
        // LD50 values are 39, 40, 41 with equal weight: variance 2/3.
        RngStream rng(117, 0);
        const auto batch = nsel_ld50_model_averaged(posterior, Design(0, 1, {}), {100, 100}, rng);
        CHECK(std::abs(batch.mean - (-2.0 / 3.0)) < 1e-10);
    }
    SUBCASE("uninformative extreme doses leave the variance in place") {
        // rho is indistinguishable from zero at every dose, so observations
        // carry no information and the expected posterior variance stays at
        // the prior-sample variance 2/3.
        const auto path = write_posterior(
            "extreme", "1,-78.0,2.0,,\n1,-80.0,2.0,,\n1,-82.0,2.0,,\n");
        const auto posterior = load_posterior_samples(path);
        RngStream rng(118, 0);
        const auto batch =
            nsel_ld50_model_averaged(posterior, Design(2, 1, {-1.0, 1.0}), {2000, 2000}, rng);
        CHECK(batch.mean == doctest::Approx(-2.0 / 3.0).epsilon(0.08));
    }
    SUBCASE("undefined-LD50 samples are rejected and counted") {
        const auto path = write_posterior("reject", "1,0.3,2.0,,\n1,0.5,0.0,,\n");
        const auto posterior = load_posterior_samples(path);
        RngStream rng(119, 0);
        const auto batch =
            nsel_ld50_model_averaged(posterior, Design(1, 1, {0.0}), {500, 200}, rng);
        CHECK(batch.rejected_draws > 0);
        // Only the defined sample survives, so the loss collapses to zero.
        for (double v : batch.values) CHECK(std::abs(v) < 1e-12);
    }
}
