#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "ace/math.hpp"
#include "ace/models/dose_response.hpp"

using namespace ace;

namespace {

std::string write_temp_csv(const char* name, const std::string& body) {
    std::string path = std::string("/tmp/ace_test_") + name + ".csv";
    std::ofstream out(path);
    out << body;
    return path;
}

const char* reference_path() {
    static const std::string path = [] {
        // Resolved relative to the repository when tests run from build/.
        for (const char* candidate : {"data/beetle_posterior.csv", "../data/beetle_posterior.csv",
                                      "../../data/beetle_posterior.csv"}) {
            if (std::ifstream(candidate).good()) return std::string(candidate);
        }
        return std::string("data/beetle_posterior.csv");
    }();
    return path.c_str();
}

} // namespace

TEST_CASE("ld50 closed forms") {
    SUBCASE("logit first order") {
        const double beta[] = {0.0, 2.0};
        CHECK(ld50(1, beta) == 0.0);
    }
    SUBCASE("c-log-log first order uses w = log(-log 0.5)") {
        const double beta[] = {0.0, 1.0};
        CHECK(ld50(3, beta) == doctest::Approx(std::log(-std::log(0.5))).epsilon(1e-12));
        CHECK(ld50(3, beta) == doctest::Approx(-0.36651).epsilon(1e-4));
    }
    SUBCASE("logit second order quadratic root") {
        const double beta[] = {-1.0, 0.0, 1.0};
        CHECK(ld50(2, beta) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("error branches") {
        const double flat[] = {0.3, 0.0};
        CHECK_THROWS_AS((void)ld50(1, flat), UndefinedLd50Error);
        const double no_curvature[] = {0.3, 1.0, 0.0};
        CHECK_THROWS_AS((void)ld50(2, no_curvature), UndefinedLd50Error);
        const double negative_disc[] = {5.0, 0.1, 1.0};
        CHECK_THROWS_AS((void)ld50(2, negative_disc), UndefinedLd50Error);
    }
}

TEST_CASE("ld50 consistency: inverse link at the returned dose is one half") {
    RngStream rng(81, 0);
    for (std::size_t u : {1u, 3u, 5u}) {
        for (int rep = 0; rep < 200; ++rep) {
            const double beta[] = {rng.uniform(-2.0, 2.0), rng.uniform(0.5, 5.0)};
            const double dose = ld50(u, beta);
            CHECK(std::abs(dose_response_probability(u, beta, dose) - 0.5) < 1e-10);
        }
    }
    // Second-order models obey the same fixed point.
    for (std::size_t u : {2u, 4u, 6u}) {
        for (int rep = 0; rep < 200; ++rep) {
            const double ld = rng.uniform(-0.8, 0.8);
            const double b1 = rng.uniform(0.5, 4.0);
            const double b2 = rng.uniform(0.1, 2.0);
            const double w = (u == 4) ? std::log(-std::log(0.5)) : 0.0;
            const double beta[] = {w - b1 * ld - b2 * ld * ld, b1, b2};
            const double dose = ld50(u, beta);
            CHECK(std::abs(dose_response_probability(u, beta, dose) - 0.5) < 1e-10);
        }
    }
}

TEST_CASE("dose-response simulation") {
    RngStream rng(82, 0);
    SUBCASE("rho = 0 gives zero counts almost surely") {
        const double beta[] = {-60.0, 1.0};
        const double doses[] = {0.0};
        for (int i = 0; i < 1000; ++i) {
            CHECK(dose_response_simulate(1, beta, doses, 60.0, rng)[0] == 0.0);
        }
    }
    SUBCASE("rho = 1 mean count is lambda") {
        const double beta[] = {60.0, 1.0};
        const double doses[] = {0.0};
        double sum = 0.0;
        const int reps = 100000;
        for (int i = 0; i < reps; ++i) sum += dose_response_simulate(1, beta, doses, 60.0, rng)[0];
        CHECK(std::abs(sum / reps - 60.0) < 3.0 * std::sqrt(60.0 / reps));
    }
    SUBCASE("reproducible counts") {
        RngStream a(4, 4);
        RngStream b(4, 4);
        const double beta[] = {0.2, 2.0};
        const double doses[] = {-0.5, 0.0, 0.5};
        CHECK(dose_response_simulate(3, beta, doses, 60.0, a) ==
              dose_response_simulate(3, beta, doses, 60.0, b));
    }
    SUBCASE("simulation frequency matches the pmf") {
        const double beta[] = {0.5, 1.5};
        const double doses[] = {0.2};
        const double rho = dose_response_probability(5, beta, 0.2);
        const double counts_target[] = {30.0};
        const double prob = std::exp(log_poisson_pmf(30.0, 60.0 * rho));
        std::size_t hits = 0;
        const int reps = 200000;
        for (int i = 0; i < reps; ++i) {
            hits += dose_response_simulate(5, beta, doses, 60.0, rng)[0] == counts_target[0];
        }
        const double freq = static_cast<double>(hits) / reps;
        CHECK(std::abs(freq - prob) < 3.0 * std::sqrt(prob * (1.0 - prob) / reps));
    }
}

TEST_CASE("coded-to-natural dose mapping") {
    CHECK(dose_to_natural_scale(-1.0) == doctest::Approx(1.6907));
    CHECK(dose_to_natural_scale(1.0) == doctest::Approx(1.8839));
    CHECK(dose_to_natural_scale(0.0) == doctest::Approx(0.5 * (1.6907 + 1.8839)));
}

TEST_CASE("posterior sample ingestion") {
    SUBCASE("reference file carries the published weights") {
        const auto posterior = load_posterior_samples(reference_path());
        CHECK(posterior.weights()[0] == doctest::Approx(0.0216));
        CHECK(posterior.weights()[1] == doctest::Approx(0.0686));
        CHECK(posterior.weights()[2] == doctest::Approx(0.7580));
        CHECK(posterior.weights()[3] == doctest::Approx(0.0612));
        CHECK(posterior.weights()[4] == doctest::Approx(0.0304));
        CHECK(posterior.weights()[5] == doctest::Approx(0.0602));
        CHECK(posterior.samples().size() == 2400);
    }
    SUBCASE("single-model single-sample posterior is accepted") {
        const auto path = write_temp_csv("single", "u,b0,b1,b2,weight\n1,0.1,2.0,,\n");
        const auto posterior = load_posterior_samples(path);
        CHECK(posterior.samples().size() == 1);
        // Defaults to the reference weights when no weight rows appear.
        CHECK(posterior.weights()[2] == doctest::Approx(0.7580));
        RngStream rng(5, 0);
        CHECK(posterior.draw_index(rng) == 0);
    }
    SUBCASE("negative weight rejected") {
        const auto path = write_temp_csv(
            "negw",
            "u,b0,b1,b2,weight\n1,,,,-0.5\n2,,,,1.5\n3,,,,0\n4,,,,0\n5,,,,0\n6,,,,0\n1,0.1,2.0,,\n");
        CHECK_THROWS_AS((void)load_posterior_samples(path), IngestionError);
    }
    SUBCASE("weights must sum to one") {
        const auto path = write_temp_csv(
            "badsum",
            "u,b0,b1,b2,weight\n1,,,,0.5\n2,,,,0.1\n3,,,,0.1\n4,,,,0.1\n5,,,,0.1\n6,,,,0.05\n1,0.1,2.0,,\n");
        CHECK_THROWS_AS((void)load_posterior_samples(path), IngestionError);
    }
    SUBCASE("schema violations") {
        CHECK_THROWS_AS((void)load_posterior_samples(write_temp_csv("hdr", "a,b\n")), IngestionError);
        CHECK_THROWS_AS(
            (void)load_posterior_samples(write_temp_csv("b2first", "u,b0,b1,b2,weight\n1,0.1,2.0,0.3,\n")),
            IngestionError);
        CHECK_THROWS_AS(
            (void)load_posterior_samples(write_temp_csv("nob2", "u,b0,b1,b2,weight\n2,0.1,2.0,,\n")),
            IngestionError);
        CHECK_THROWS_AS(
            (void)load_posterior_samples(write_temp_csv("badu", "u,b0,b1,b2,weight\n7,0.1,2.0,,\n")),
            IngestionError);
        CHECK_THROWS_AS((void)load_posterior_samples("/nonexistent/file.csv"), IngestionError);
    }
}

TEST_CASE("posterior LD50 moments") {
    const auto posterior = load_posterior_samples(reference_path());
    const auto moments = posterior.ld50_moments();
    CHECK(moments.undefined_samples == 0);
    // Synthetic reference data centers near -0.17 on the coded scale with
    // spread close to 0.045.
    CHECK(moments.mean == doctest::Approx(-0.17).epsilon(0.1));
    CHECK(std::sqrt(moments.variance) == doctest::Approx(0.045).epsilon(0.15));
}

TEST_CASE("beetle dose data ingestion") {
    SUBCASE("shipped file") {
        static const std::string path = [] {
            for (const char* candidate : {"data/beetle_doses.csv", "../data/beetle_doses.csv",
                                          "../../data/beetle_doses.csv"}) {
                if (std::ifstream(candidate).good()) return std::string(candidate);
            }
            return std::string("data/beetle_doses.csv");
        }();
        const auto records = load_beetle_doses(path);
        CHECK(records.size() == 8);
        std::size_t total = 0;
        for (const auto& rec : records) total += rec.group_size;
        CHECK(total == 481);
        CHECK(records.front().dose == doctest::Approx(1.6907));
        CHECK(records.back().deaths == 60);
    }
    SUBCASE("invalid rows rejected") {
        CHECK_THROWS_AS((void)load_beetle_doses(write_temp_csv("dosehdr", "x,y,z\n")), IngestionError);
        CHECK_THROWS_AS(
            (void)load_beetle_doses(write_temp_csv("dosecnt", "dose,n,deaths\n1.7,10,12\n")),
            IngestionError);
    }
}
