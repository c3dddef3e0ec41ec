// ace: Bayesian design of experiments by approximate coordinate exchange.
//
// Subcommands: optimize, evaluate, efficiency, sweep, lhs. Problems are
// described by a JSON config (model + utility + algorithm constants); all
// randomness flows from one master seed, so reruns are byte-identical.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <thread>

#include "ace/ace.hpp"
#include "ace/csv.hpp"
#include "ace/gp.hpp"
#include "ace/lhs.hpp"
#include "ace/log.hpp"
#include "ace/models/compartmental.hpp"
#include "ace/models/dose_response.hpp"
#include "ace/models/logistic.hpp"
#include "ace/models/poisson_toy.hpp"
#include "ace/utility.hpp"

namespace {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

// A fully wired problem: model (or posterior), estimator, design space.
struct Problem {
    std::string model_name;
    std::string utility_name;
    std::unique_ptr<ace::Model> model;
    std::unique_ptr<ace::DoseResponsePosterior> posterior;
    std::unique_ptr<ace::UtilityEstimator> estimator;
    ace::DesignSpace space;
    std::function<ace::Design(const ace::Design&)> transform;  // DRS expansion
    bool dose_scale_output = false;
    ace::AceConfig ace;
    std::uint64_t seed = 1;
    std::string out_dir = "results";
};

ace::Marginal parse_marginal(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "uniform") return ace::Marginal::uniform(j.at("lo"), j.at("hi"));
    if (type == "normal") return ace::Marginal::normal(j.at("mean"), j.at("var"));
    if (type == "log_normal") return ace::Marginal::log_normal(j.at("log_mean"), j.at("log_var"));
    if (type == "triangular") return ace::Marginal::triangular_decreasing(j.at("upper"));
    if (type == "point") return ace::Marginal::point_mass(j.at("value"));
    throw ConfigError("unknown prior type '" + type + "'");
}

ace::PriorSpec parse_prior_list(const json& j, std::size_t expected) {
    ace::PriorSpec prior;
    for (const auto& entry : j) prior.marginals.push_back(parse_marginal(entry));
    if (prior.dim() != expected) {
        throw ConfigError("prior list must have " + std::to_string(expected) + " entries");
    }
    prior.validate();
    return prior;
}

ace::UtilityKind parse_utility(const std::string& name) {
    if (name == "sig") return ace::UtilityKind::Sig;
    if (name == "nsel") return ace::UtilityKind::Nsel;
    if (name == "pseudo_d") return ace::UtilityKind::PseudoD;
    if (name == "pseudo_a") return ace::UtilityKind::PseudoA;
    if (name == "nsel_ld50") return ace::UtilityKind::NselLd50;
    throw ConfigError("unknown utility '" + name + "'");
}

void parse_ace_block(const json& config, ace::AceConfig& ace_cfg) {
    if (!config.contains("ace")) return;
    const json& a = config.at("ace");
    if (a.contains("B")) ace_cfg.comparison_B = a.at("B").get<std::size_t>();
    if (a.contains("B_emulator")) ace_cfg.emulator_B = a.at("B_emulator").get<std::size_t>();
    if (a.contains("m")) ace_cfg.m = a.at("m").get<std::size_t>();
    if (a.contains("N_I")) ace_cfg.phase1_sweeps = a.at("N_I").get<std::size_t>();
    if (a.contains("N_II")) ace_cfg.phase2_iters = a.at("N_II").get<std::size_t>();
    if (a.contains("M")) ace_cfg.starts = a.at("M").get<std::size_t>();
    if (a.contains("C")) ace_cfg.final_reps = a.at("C").get<std::size_t>();
    if (a.contains("n_grid")) ace_cfg.n_grid = a.at("n_grid").get<std::size_t>();
    if (a.contains("phase2")) ace_cfg.phase2_enabled = a.at("phase2").get<bool>();
}

std::size_t inner_override(const json& config) {
    if (config.contains("ace") && config.at("ace").contains("B_tilde")) {
        return config.at("ace").at("B_tilde").get<std::size_t>();
    }
    return 0;  // inner size follows the requested batch size
}

Problem build_problem(const json& config) {
    Problem problem;
    if (config.value("schema_version", 1) != 1) {
        throw ConfigError("unsupported schema_version");
    }
    problem.seed = config.value("seed", 1ull);
    problem.out_dir = config.value("out", std::string("results"));
    parse_ace_block(config, problem.ace);

    const json& model_cfg = config.at("model");
    problem.model_name = model_cfg.at("name").get<std::string>();
    problem.utility_name = config.at("utility").get<std::string>();
    const ace::UtilityKind kind = parse_utility(problem.utility_name);
    const std::size_t b_tilde = inner_override(config);

    if (problem.model_name == "poisson_toy") {
        const auto prior = model_cfg.contains("beta_prior")
                               ? parse_marginal(model_cfg.at("beta_prior"))
                               : ace::Marginal::normal(0.5, 1.0);
        problem.model = std::make_unique<ace::PoissonToyModel>(prior);
        ace::CoordinateDomain domain{-1.0, 1.0, {}};
        const auto levels = model_cfg.value("grid_levels", 0u);
        if (levels > 1) {
            for (std::size_t g = 0; g < levels; ++g) {
                domain.levels.push_back(-1.0 + 2.0 * static_cast<double>(g) /
                                                   static_cast<double>(levels - 1));
            }
        }
        problem.space = ace::DesignSpace::homogeneous(
            1, 1, std::span<const ace::CoordinateDomain>(&domain, 1));
        problem.space.constraint = [](std::size_t, double value, const ace::Design&) {
            return value != 0.0;
        };
    } else if (problem.model_name == "compartmental") {
        const auto n = model_cfg.at("n").get<std::size_t>();
        auto prior = model_cfg.contains("theta_prior")
                         ? parse_prior_list(model_cfg.at("theta_prior"), 3)
                         : ace::CompartmentalModel::default_prior();
        problem.model = std::make_unique<ace::CompartmentalModel>(std::move(prior));
        const double min_gap = model_cfg.value("min_gap", 0.25);
        if (model_cfg.value("drs", false)) {
            double alpha_lo = 0.01;
            double alpha_hi = 5.0;
            if (model_cfg.contains("alpha_domain")) {
                alpha_lo = model_cfg.at("alpha_domain").at(0).get<double>();
                alpha_hi = model_cfg.at("alpha_domain").at(1).get<double>();
            }
            if (!(alpha_lo > 0.0) || !(alpha_hi > alpha_lo)) {
                throw ConfigError("alpha_domain must satisfy 0 < lo < hi");
            }
            const ace::CoordinateDomain domain{alpha_lo, alpha_hi, {}};
            problem.space = ace::DesignSpace::homogeneous(
                2, 1, std::span<const ace::CoordinateDomain>(&domain, 1));
            problem.space.constraint = ace::drs_spacing_constraint(n);
            problem.transform = [n](const ace::Design& alphas) {
                return ace::drs_expand_design(alphas, n);
            };
            // Replicated times are impossible under the DRS, and the spacing
            // constraint forbids them anyway.
            problem.ace.phase2_enabled = false;
        } else {
            const ace::CoordinateDomain domain{0.0, 24.0, {}};
            problem.space = ace::DesignSpace::homogeneous(
                n, 1, std::span<const ace::CoordinateDomain>(&domain, 1));
            if (min_gap > 0.0) {
                problem.space.constraint = ace::min_spacing_constraint(min_gap);
                problem.ace.phase2_enabled = false;  // replicates violate the spacing rule
            }
        }
    } else if (problem.model_name == "logistic") {
        const auto n = model_cfg.at("n").get<std::size_t>();
        auto prior = model_cfg.contains("beta_prior")
                         ? parse_prior_list(model_cfg.at("beta_prior"), 5)
                         : ace::LogisticModel::default_beta_prior();
        problem.model = std::make_unique<ace::LogisticModel>(std::move(prior));
        const ace::CoordinateDomain domain{-1.0, 1.0, {}};
        const std::vector<ace::CoordinateDomain> columns(4, domain);
        problem.space = ace::DesignSpace::homogeneous(n, 4, columns);
    } else if (problem.model_name == "hier_logistic") {
        const auto groups = model_cfg.at("G").get<std::size_t>();
        const auto per_group = model_cfg.at("n_g").get<std::size_t>();
        auto prior = model_cfg.contains("beta_prior")
                         ? parse_prior_list(model_cfg.at("beta_prior"), 5)
                         : ace::LogisticModel::default_beta_prior();
        std::array<double, 5> bounds = ace::HierLogisticModel::kDefaultHalfWidthBounds;
        if (model_cfg.contains("L")) {
            for (std::size_t r = 0; r < 5; ++r) bounds[r] = model_cfg.at("L").at(r).get<double>();
        }
        problem.model = std::make_unique<ace::HierLogisticModel>(
            groups, per_group, std::move(prior), bounds, model_cfg.value("fisher_mc", 100u));
        const ace::CoordinateDomain domain{-1.0, 1.0, {}};
        const std::vector<ace::CoordinateDomain> columns(4, domain);
        problem.space = ace::DesignSpace::homogeneous(groups * per_group, 4, columns);
        // Point exchange across groups is not defined for grouped designs.
        problem.ace.phase2_enabled = false;
    } else if (problem.model_name == "dose_response") {
        const auto n0 = model_cfg.at("n0").get<std::size_t>();
        const auto path = model_cfg.at("posterior").get<std::string>();
        problem.posterior = std::make_unique<ace::DoseResponsePosterior>(
            ace::load_posterior_samples(path, model_cfg.value("lambda", 60.0)));
        const ace::CoordinateDomain domain{-1.0, 1.0, {}};
        problem.space = ace::DesignSpace::homogeneous(
            n0, 1, std::span<const ace::CoordinateDomain>(&domain, 1));
        problem.dose_scale_output = true;
    } else {
        throw ConfigError("unknown model '" + problem.model_name + "'");
    }

    // Model/utility compatibility.
    if (kind == ace::UtilityKind::NselLd50) {
        if (!problem.posterior) {
            throw ConfigError("utility nsel_ld50 requires the dose_response model");
        }
        problem.estimator = ace::make_ld50_utility(*problem.posterior, b_tilde);
    } else {
        if (!problem.model) {
            throw ConfigError("model dose_response only supports the nsel_ld50 utility");
        }
        if ((kind == ace::UtilityKind::PseudoD || kind == ace::UtilityKind::PseudoA) &&
            !problem.model->has_fisher_information()) {
            throw ConfigError("utility " + problem.utility_name +
                              " requires a model with Fisher information");
        }
        problem.estimator = ace::make_model_utility(kind, *problem.model, b_tilde);
        if (problem.transform) {
            problem.estimator =
                ace::make_transformed_utility(std::move(problem.estimator), problem.transform);
        }
    }
    problem.ace.validate();
    return problem;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
}

Problem load_problem(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
                     const std::string& out_override, std::size_t threads) {
    const json config = load_config(config_path);
    Problem problem;
    try {
        problem = build_problem(config);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    } catch (const ace::IngestionError& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
    if (has_seed) problem.seed = seed_override;
    if (!out_override.empty()) problem.out_dir = out_override;
    problem.ace.threads = threads > 0 ? threads : std::thread::hardware_concurrency();
    if (problem.ace.threads == 0) problem.ace.threads = 1;
    return problem;
}

std::vector<std::pair<std::string, std::string>> design_metadata(const Problem& problem,
                                                                 const ace::Design& design) {
    std::vector<std::pair<std::string, std::string>> meta;
    meta.emplace_back("model", problem.model_name);
    meta.emplace_back("utility", problem.utility_name);
    meta.emplace_back("seed", std::to_string(problem.seed));
    meta.emplace_back("B", std::to_string(problem.ace.comparison_B));
    meta.emplace_back("B_emulator", std::to_string(problem.ace.emulator_B));
    meta.emplace_back("m", std::to_string(problem.ace.m));
    meta.emplace_back("N_I", std::to_string(problem.ace.phase1_sweeps));
    meta.emplace_back("N_II", std::to_string(problem.ace.phase2_iters));
    meta.emplace_back("M", std::to_string(problem.ace.starts));
    meta.emplace_back("C", std::to_string(problem.ace.final_reps));
    meta.emplace_back("phase2", problem.ace.phase2_enabled ? "on" : "off");
    if (problem.dose_scale_output) {
        std::string natural;
        for (std::size_t i = 0; i < design.q(); ++i) {
            if (!natural.empty()) natural += " ";
            natural += ace::format_double(ace::dose_to_natural_scale(design.coord(i)));
        }
        meta.emplace_back("natural_scale_doses", natural);
    }
    return meta;
}

void check_design_matches_space(const Problem& problem, const ace::Design& design) {
    if (design.n_runs() != problem.space.n || design.n_vars() != problem.space.v) {
        throw ConfigError("design dimensions do not match the configured problem");
    }
    if (!problem.space.design_feasible(design)) {
        throw ConfigError("design violates the configured design space");
    }
}

int cmd_optimize(const Problem& problem) {
    namespace fs = std::filesystem;
    fs::create_directories(problem.out_dir);

    const ace::AceResult result =
        ace::multi_start(*problem.estimator, problem.space, problem.ace, problem.seed);

    {
        std::ofstream out(fs::path(problem.out_dir) / "design.csv");
        auto meta = design_metadata(problem, result.selected);
        meta.emplace_back("selected_start", std::to_string(result.selected_start + 1));
        ace::write_design_csv(out, result.selected, meta);
    }
    {
        std::ofstream out(fs::path(problem.out_dir) / "trace.csv");
        out << "start,phase,sweep,index,utility_estimate,p_accept,accepted\n";
        for (std::size_t k = 0; k < result.runs.size(); ++k) {
            for (const auto& rec : result.runs[k].trace) {
                if (rec.skipped) continue;  // no acceptance test took place
                out << (k + 1) << "," << (rec.phase == ace::AcePhase::I ? "I" : "II") << ","
                    << (rec.sweep + 1) << "," << (rec.index + 1) << ","
                    << ace::format_double(rec.utility) << "," << ace::format_double(rec.p_accept)
                    << "," << (rec.accepted ? 1 : 0) << "\n";
            }
        }
    }
    {
        std::ofstream out(fs::path(problem.out_dir) / "summary.csv");
        out << "start,utility_mean,utility_se,selected\n";
        for (std::size_t k = 0; k < result.start_utility.size(); ++k) {
            out << (k + 1) << "," << ace::format_double(result.start_utility[k]) << ","
                << ace::format_double(result.start_se[k]) << ","
                << (k == result.selected_start ? 1 : 0) << "\n";
        }
    }
    std::printf("selected start %zu, estimated utility %s\n", result.selected_start + 1,
                ace::format_double(result.start_utility[result.selected_start]).c_str());
    return 0;
}

int cmd_evaluate(const Problem& problem, const std::string& design_path, std::size_t reps,
                 std::size_t batch_size) {
    ace::Design design;
    try {
        design = ace::read_design_csv_file(design_path);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    check_design_matches_space(problem, design);

    namespace fs = std::filesystem;
    fs::create_directories(problem.out_dir);
    std::ofstream out(fs::path(problem.out_dir) / "evaluation.csv");
    out << "rep,utility_estimate\n";
    for (std::size_t c = 0; c < reps; ++c) {
        ace::RngStream rng(problem.seed, 900000 + c);
        const auto batch = problem.estimator->evaluate(design, batch_size, rng);
        out << (c + 1) << "," << ace::format_double(batch.mean) << "\n";
    }
    return 0;
}

int cmd_efficiency(const Problem& problem, const std::string& path1, const std::string& path2,
                   std::size_t batch_size) {
    if (!problem.model || !problem.model->has_fisher_information()) {
        throw ConfigError("efficiency requires a model with Fisher information");
    }
    ace::Design d1;
    ace::Design d2;
    try {
        d1 = ace::read_design_csv_file(path1);
        d2 = ace::read_design_csv_file(path2);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    check_design_matches_space(problem, d1);
    check_design_matches_space(problem, d2);
    if (problem.transform) {
        d1 = problem.transform(d1);
        d2 = problem.transform(d2);
    }
    ace::RngStream rng(problem.seed, 910000);
    const double eff = ace::d_efficiency(d1, d2, *problem.model, problem.model->interest_dim(),
                                         batch_size, rng);
    std::printf("%.2f\n", eff);
    return 0;
}

int cmd_sweep(const Problem& problem, const std::string& grid_spec, std::size_t batch_size) {
    const std::size_t q = problem.space.q();
    if (q > 2) throw ConfigError("sweep supports at most 2 free coordinates");

    bool regular = false;
    std::string count_text = grid_spec;
    if (grid_spec.rfind("regular:", 0) == 0) {
        regular = true;
        count_text = grid_spec.substr(8);
    } else if (grid_spec.rfind("random:", 0) == 0) {
        count_text = grid_spec.substr(7);
    }
    std::size_t count = 0;
    try {
        count = std::stoul(count_text);
    } catch (...) {
        throw ConfigError("malformed --grid spec '" + grid_spec + "'");
    }
    if (count < 1) throw ConfigError("--grid must request at least one point");

    std::vector<ace::Design> candidates;
    ace::RngStream rng(problem.seed, 920000);
    if (regular) {
        const auto level = [&](std::size_t i, std::size_t g) {
            const auto& dom = problem.space.domains[i];
            if (count == 1) return 0.5 * (dom.lo + dom.hi);
            return dom.lo + (dom.hi - dom.lo) * static_cast<double>(g) /
                                static_cast<double>(count - 1);
        };
        if (q == 1) {
            for (std::size_t g = 0; g < count; ++g) {
                candidates.emplace_back(1, 1, std::vector<double>{level(0, g)});
            }
        } else {
            for (std::size_t g1 = 0; g1 < count; ++g1) {
                for (std::size_t g2 = 0; g2 < count; ++g2) {
                    candidates.emplace_back(
                        problem.space.n, problem.space.v,
                        std::vector<double>{level(0, g1), level(1, g2)});
                }
            }
        }
    } else {
        for (std::size_t g = 0; g < count; ++g) {
            std::vector<double> coords(q);
            for (std::size_t i = 0; i < q; ++i) {
                coords[i] = rng.uniform(problem.space.domains[i].lo, problem.space.domains[i].hi);
            }
            candidates.emplace_back(problem.space.n, problem.space.v, std::move(coords));
        }
    }

    namespace fs = std::filesystem;
    fs::create_directories(problem.out_dir);
    std::ofstream out(fs::path(problem.out_dir) / "sweep.csv");
    if (q == 1) {
        out << "x1,utility_estimate\n";
    } else {
        out << "x1,x2,utility_estimate\n";
    }
    for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
        const ace::Design& candidate = candidates[idx];
        double value = 0.0;  // infeasible candidates recorded as zero utility
        if (problem.space.design_feasible(candidate)) {
            ace::RngStream eval_rng(problem.seed, 930000 + idx);
            value = problem.estimator->evaluate(candidate, batch_size, eval_rng).mean;
        }
        for (std::size_t i = 0; i < q; ++i) {
            out << ace::format_double(candidate.coord(i)) << ",";
        }
        out << ace::format_double(value) << "\n";
    }
    return 0;
}

// One emulation slice for diagnostics: coordinate-design evaluations of the
// utility at coordinate `coord` of a design, the fitted smoother sampled on
// a regular grid, and the grid maximizer.
int cmd_emulate(const Problem& problem, const std::string& design_path, std::size_t coord,
                std::size_t batch_size) {
    ace::Design design;
    if (design_path.empty()) {
        ace::RngStream init_rng(problem.seed, 950000);
        design = ace::random_feasible_lhs(problem.space, init_rng);
    } else {
        try {
            design = ace::read_design_csv_file(design_path);
        } catch (const std::runtime_error& e) {
            throw ConfigError(e.what());
        }
        check_design_matches_space(problem, design);
    }
    if (coord < 1 || coord > problem.space.q()) {
        throw ConfigError("--coordinate must be in 1.." + std::to_string(problem.space.q()));
    }
    const std::size_t i = coord - 1;
    const auto& domain = problem.space.domains[i];

    ace::RngStream rng(problem.seed, 960000);
    std::vector<double> sites;
    std::vector<double> evaluations;
    for (double x : ace::lhs_1d(problem.ace.m, {domain.lo, domain.hi}, rng)) {
        if (!problem.space.coordinate_feasible(i, x, design)) continue;
        sites.push_back(x);
        evaluations.push_back(
            problem.estimator->evaluate(design.with_coord(i, x), batch_size, rng).mean);
    }
    if (sites.size() < 3) throw std::runtime_error("emulate: feasible slice too small");

    const auto st = ace::standardize(evaluations);
    if (st.constant) throw std::runtime_error("emulate: constant utility along this coordinate");
    const auto fit = ace::fit_emulator(sites, evaluations);

    namespace fs = std::filesystem;
    fs::create_directories(problem.out_dir);
    std::ofstream out(fs::path(problem.out_dir) / "emulator.csv");
    out << "kind,x,value\n";
    for (std::size_t j = 0; j < sites.size(); ++j) {
        out << "evaluation," << ace::format_double(sites[j]) << ","
            << ace::format_double(evaluations[j]) << "\n";
    }
    for (int g = 0; g <= 400; ++g) {
        const double x = domain.lo + (domain.hi - domain.lo) * static_cast<double>(g) / 400.0;
        out << "prediction," << ace::format_double(x) << ","
            << ace::format_double(fit.predict(x)) << "\n";
    }
    const auto top = ace::maximize_on_grid(
        fit, domain,
        [&](double x) { return problem.space.coordinate_feasible(i, x, design); },
        problem.ace.n_grid, rng);
    out << "argmax," << ace::format_double(top.argmax) << "," << ace::format_double(top.value)
        << "\n";
    return 0;
}

int cmd_lhs(const Problem& problem, std::size_t n_runs, bool maximin) {
    const std::size_t n = n_runs > 0 ? n_runs : problem.space.n;
    std::vector<ace::Interval> intervals(problem.space.v);
    for (std::size_t j = 0; j < problem.space.v; ++j) {
        intervals[j] = {problem.space.column_domain(j).lo, problem.space.column_domain(j).hi};
    }
    ace::RngStream rng(problem.seed, 940000);
    ace::Design design;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<double> delta = maximin
                                        ? ace::maximin_lhs(n, problem.space.v, intervals, rng)
                                        : ace::lhs_random_design(n, problem.space.v, intervals, rng);
        ace::Design candidate(n, problem.space.v, std::move(delta));
        if (n != problem.space.n || problem.space.design_feasible(candidate)) {
            design = std::move(candidate);
            break;
        }
    }
    if (design.q() == 0) throw std::runtime_error("lhs: no feasible design after bounded retries");

    namespace fs = std::filesystem;
    fs::create_directories(problem.out_dir);
    std::ofstream out(fs::path(problem.out_dir) / (maximin ? "lhs_maximin.csv" : "lhs_random.csv"));
    auto meta = design_metadata(problem, design);
    meta.emplace_back("generator", maximin ? "maximin_lhs" : "random_lhs");
    ace::write_design_csv(out, design, meta);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian optimal design of experiments via approximate coordinate exchange"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed_override = 0;
    bool has_seed = false;
    std::string out_override;
    std::size_t threads = 0;
    std::size_t batch_override = 0;
    std::size_t reps_override = 0;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "problem configuration JSON")->required();
        cmd->add_option("--seed", seed_override, "override the config seed")
            ->each([&](const std::string&) { has_seed = true; });
        cmd->add_option("--out", out_override, "override the output directory");
        cmd->add_option("--threads", threads, "multi-start worker threads (default: cores)");
        cmd->add_option("--B", batch_override, "override the comparison sample size");
    };

    auto* optimize = app.add_subcommand("optimize", "run the multi-start optimizer");
    add_common(optimize);

    auto* evaluate = app.add_subcommand("evaluate", "re-evaluate a design repeatedly");
    add_common(evaluate);
    std::string design_path;
    evaluate->add_option("--design", design_path, "design CSV to evaluate")->required();
    evaluate->add_option("--reps", reps_override, "number of evaluations (default C)");

    auto* efficiency = app.add_subcommand("efficiency", "D-efficiency of design1 relative to design2");
    add_common(efficiency);
    std::string design1_path;
    std::string design2_path;
    efficiency->add_option("--design1", design1_path, "numerator design CSV")->required();
    efficiency->add_option("--design2", design2_path, "reference design CSV")->required();

    auto* sweep = app.add_subcommand("sweep", "evaluate the utility over a 1-D or 2-D grid");
    add_common(sweep);
    std::string grid_spec = "10000";
    sweep->add_option("--grid", grid_spec, "N | random:N | regular:N (default random 10000)");

    auto* lhs = app.add_subcommand("lhs", "emit a random or maximin LHS comparator design");
    add_common(lhs);
    std::size_t lhs_runs = 0;
    bool maximin = false;
    lhs->add_option("--n", lhs_runs, "number of runs (default: config n)");
    lhs->add_flag("--maximin", maximin, "simulated-annealing maximin LHS");

    auto* emulate = app.add_subcommand("emulate", "dump one coordinate-slice emulation as CSV");
    add_common(emulate);
    std::string emulate_design;
    std::size_t emulate_coord = 1;
    emulate->add_option("--design", emulate_design, "design CSV (default: random LHS)");
    emulate->add_option("--coordinate", emulate_coord, "1-based coordinate index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        Problem problem = load_problem(config_path, seed_override, has_seed, out_override, threads);
        if (batch_override > 0) problem.ace.comparison_B = batch_override;
        const std::size_t eval_batch = problem.ace.comparison_B;

        if (optimize->parsed()) return cmd_optimize(problem);
        if (evaluate->parsed()) {
            const std::size_t reps = reps_override > 0 ? reps_override : problem.ace.final_reps;
            return cmd_evaluate(problem, design_path, reps, eval_batch);
        }
        if (efficiency->parsed()) {
            return cmd_efficiency(problem, design1_path, design2_path, eval_batch);
        }
        if (sweep->parsed()) {
            const std::size_t sweep_batch =
                batch_override > 0 ? batch_override : problem.ace.emulator_B;
            return cmd_sweep(problem, grid_spec, sweep_batch);
        }
        if (lhs->parsed()) return cmd_lhs(problem, lhs_runs, maximin);
        if (emulate->parsed()) {
            const std::size_t slice_batch =
                batch_override > 0 ? batch_override : problem.ace.emulator_B;
            return cmd_emulate(problem, emulate_design, emulate_coord, slice_batch);
        }
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
}
