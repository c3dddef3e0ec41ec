#include "ace/ace.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "ace/gp.hpp"
#include "ace/lhs.hpp"
#include "ace/log.hpp"
#include "ace/math.hpp"

namespace ace {

namespace {

constexpr std::size_t kStratumAttempts = 50;
constexpr std::uint64_t kRunStreamBase = 1;

TraceRecord skipped_record(AcePhase phase, std::size_t sweep, std::size_t index) {
    TraceRecord rec;
    rec.phase = phase;
    rec.sweep = sweep;
    rec.index = index;
    rec.utility = std::numeric_limits<double>::quiet_NaN();
    rec.p_accept = std::numeric_limits<double>::quiet_NaN();
    rec.skipped = true;
    return rec;
}

// Coordinate-design over the feasible part of a continuous domain: one point
// per stratum, redrawn within the stratum when the constraint rejects it;
// strata that stay infeasible are dropped.
std::vector<double> constrained_lhs_1d(const CoordinateDomain& domain,
                                       const std::function<bool(double)>& feasible, std::size_t m,
                                       RngStream& rng) {
    std::vector<double> points;
    points.reserve(m);
    const double width = (domain.hi - domain.lo) / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double lo = domain.lo + static_cast<double>(j) * width;
        for (std::size_t attempt = 0; attempt < kStratumAttempts; ++attempt) {
            const double x = lo + rng.u01() * width;
            if (!feasible || feasible(x)) {
                points.push_back(x);
                break;
            }
        }
    }
    for (std::size_t i = points.size(); i > 1; --i) {
        std::swap(points[i - 1], points[rng.uniform_index(i)]);
    }
    return points;
}

// Finite-domain analogue: feasible levels bucketed into up-to-m index
// strata, one level drawn per stratum.
std::vector<double> stratified_levels(const CoordinateDomain& domain,
                                      const std::function<bool(double)>& feasible, std::size_t m,
                                      RngStream& rng) {
    std::vector<double> usable;
    for (double level : domain.levels) {
        if (!feasible || feasible(level)) usable.push_back(level);
    }
    const std::size_t count = std::min(m, usable.size());
    std::vector<double> points;
    points.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        const std::size_t lo = j * usable.size() / count;
        const std::size_t hi = (j + 1) * usable.size() / count;
        points.push_back(usable[lo + rng.uniform_index(hi - lo)]);
    }
    for (std::size_t i = points.size(); i > 1; --i) {
        std::swap(points[i - 1], points[rng.uniform_index(i)]);
    }
    return points;
}

// Scan evaluation: a candidate design whose utility is undefined for every
// parameter draw (singular information, degenerate weights) loses the scan
// instead of aborting the run.
double batch_mean_at(const UtilityEstimator& utility, const Design& design, std::size_t B,
                     RngStream& rng) {
    try {
        return utility.evaluate(design, B, rng).mean;
    } catch (const SingularInformationError&) {
        return -std::numeric_limits<double>::infinity();
    } catch (const DegenerateWeightError&) {
        return -std::numeric_limits<double>::infinity();
    }
}

} // namespace

void AceConfig::validate() const {
    if (comparison_B < 2) throw std::invalid_argument("AceConfig: comparison_B must be >= 2");
    if (emulator_B < 1 || m < 2 || n_grid < 1) {
        throw std::invalid_argument("AceConfig: emulator_B, m, n_grid must be positive (m >= 2)");
    }
    if (phase1_sweeps < 1 || starts < 1 || final_reps < 1) {
        throw std::invalid_argument("AceConfig: phase1_sweeps, starts, final_reps must be positive");
    }
    if (phase2_enabled && phase2_iters < 1) {
        throw std::invalid_argument("AceConfig: phase2_iters must be positive when Phase II is on");
    }
}

AcceptDecision bayes_t_accept(const UtilitySampleBatch& proposed,
                              const UtilitySampleBatch& current, RngStream& rng) {
    const std::size_t b = proposed.size();
    if (b < 2 || current.size() != b) {
        throw std::invalid_argument("bayes_t_accept: batches must share a size of at least 2");
    }
    double ss = 0.0;
    for (double v : proposed.values) {
        const double d = v - proposed.mean;
        ss += d * d;
    }
    for (double v : current.values) {
        const double d = v - current.mean;
        ss += d * d;
    }
    const double dof = 2.0 * static_cast<double>(b) - 2.0;
    const double nu = ss / dof;
    const double diff = proposed.mean - current.mean;

    AcceptDecision out;
    if (nu <= 0.0) {
        out.p_accept = diff == 0.0 ? 0.5 : (diff > 0.0 ? 1.0 : 0.0);
    } else {
        const double bd = static_cast<double>(b);
        const double tstat = bd * diff / std::sqrt(2.0 * bd * nu);
        out.p_accept = 1.0 - student_t_cdf(-tstat, dof);
    }
    out.accepted = rng.u01() < out.p_accept;
    return out;
}

TraceRecord phase1_coordinate_step(Design& current, std::size_t coord,
                                   const UtilityEstimator& utility, const DesignSpace& space,
                                   const AceConfig& cfg, RngStream& rng) {
    const CoordinateDomain& domain = space.domains[coord];
    const auto feasible = [&](double x) { return space.coordinate_feasible(coord, x, current); };

    const std::vector<double> xi =
        domain.continuous() ? constrained_lhs_1d(domain, feasible, cfg.m, rng)
                            : stratified_levels(domain, feasible, cfg.m, rng);
    if (xi.size() < 3) {
        ACE_LOG_DEBUG("phase1: coordinate %zu skipped (feasible slice too small)", coord);
        return skipped_record(AcePhase::I, 0, coord);
    }

    std::vector<double> sites;
    std::vector<double> evaluations;
    sites.reserve(xi.size());
    evaluations.reserve(xi.size());
    for (const double site : xi) {
        const double value =
            batch_mean_at(utility, current.with_coord(coord, site), cfg.emulator_B, rng);
        if (std::isfinite(value)) {
            sites.push_back(site);
            evaluations.push_back(value);
        }
    }
    if (sites.size() < 3) {
        ACE_LOG_DEBUG("phase1: coordinate %zu skipped (too few finite evaluations)", coord);
        return skipped_record(AcePhase::I, 0, coord);
    }

    const Standardized st = standardize(evaluations);
    if (st.constant) {
        ACE_LOG_DEBUG("phase1: coordinate %zu skipped (constant response)", coord);
        return skipped_record(AcePhase::I, 0, coord);
    }

    const EmulatorFit fit = fit_emulator(sites, evaluations);
    double candidate;
    try {
        candidate = maximize_on_grid(fit, domain, feasible, cfg.n_grid, rng).argmax;
    } catch (const EmptyDomainError&) {
        ACE_LOG_DEBUG("phase1: coordinate %zu skipped (no feasible grid candidate)", coord);
        return skipped_record(AcePhase::I, 0, coord);
    }

    const Design proposed = current.with_coord(coord, candidate);
    TraceRecord rec;
    rec.phase = AcePhase::I;
    rec.index = coord;
    try {
        const UtilitySampleBatch batch_new = utility.evaluate(proposed, cfg.comparison_B, rng);
        const UtilitySampleBatch batch_cur = utility.evaluate(current, cfg.comparison_B, rng);
        const AcceptDecision decision = bayes_t_accept(batch_new, batch_cur, rng);
        rec.p_accept = decision.p_accept;
        rec.accepted = decision.accepted;
        rec.utility = decision.accepted ? batch_new.mean : batch_cur.mean;
        if (decision.accepted) current = proposed;
    } catch (const SingularInformationError&) {
        // Structurally degenerate proposal: never accepted.
        rec.p_accept = 0.0;
        rec.accepted = false;
        rec.utility = std::numeric_limits<double>::quiet_NaN();
        rec.skipped = true;
    } catch (const DegenerateWeightError&) {
        rec.p_accept = 0.0;
        rec.accepted = false;
        rec.utility = std::numeric_limits<double>::quiet_NaN();
        rec.skipped = true;
    }
    return rec;
}

void phase1_sweep(Design& current, const UtilityEstimator& utility, const DesignSpace& space,
                  const AceConfig& cfg, RngStream& rng, std::size_t sweep_index,
                  std::vector<TraceRecord>& trace, const StepObserver& observer) {
    for (std::size_t coord = 0; coord < space.q(); ++coord) {
        TraceRecord rec = phase1_coordinate_step(current, coord, utility, space, cfg, rng);
        rec.sweep = sweep_index;
        if (!space.design_feasible(current)) {
            throw std::logic_error("phase1_sweep: intermediate design violates its constraints");
        }
        trace.push_back(rec);
        if (observer) observer(current, trace.back());
    }
}

TraceRecord phase2_point_exchange(Design& current, const UtilityEstimator& utility,
                                  const DesignSpace& space, const AceConfig& cfg, RngStream& rng,
                                  std::size_t iteration) {
    const std::size_t n = current.n_runs();
    if (n < 2) throw std::invalid_argument("phase2_point_exchange: need at least 2 runs");

    std::size_t best_k = 0;
    double best_k_value = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double value =
            batch_mean_at(utility, current.append_run_copy(k), cfg.emulator_B, rng);
        if (value > best_k_value) {
            best_k_value = value;
            best_k = k;
        }
    }
    const Design augmented = current.append_run_copy(best_k);

    std::size_t best_h = 0;
    double best_h_value = -std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h < n + 1; ++h) {
        const double value = batch_mean_at(utility, augmented.remove_run(h), cfg.emulator_B, rng);
        if (value > best_h_value) {
            best_h_value = value;
            best_h = h;
        }
    }
    if (!std::isfinite(best_k_value) || !std::isfinite(best_h_value)) {
        ACE_LOG_DEBUG("phase2: iteration %zu skipped (every scan candidate degenerate)", iteration);
        return skipped_record(AcePhase::II, iteration, best_h);
    }
    const Design proposed = augmented.remove_run(best_h);

    if (!space.design_feasible(proposed)) {
        ACE_LOG_DEBUG("phase2: iteration %zu skipped (proposal infeasible)", iteration);
        return skipped_record(AcePhase::II, iteration, best_h);
    }

    TraceRecord rec;
    rec.phase = AcePhase::II;
    rec.sweep = iteration;
    rec.index = best_h;
    try {
        const UtilitySampleBatch batch_new = utility.evaluate(proposed, cfg.comparison_B, rng);
        const UtilitySampleBatch batch_cur = utility.evaluate(current, cfg.comparison_B, rng);
        const AcceptDecision decision = bayes_t_accept(batch_new, batch_cur, rng);
        rec.p_accept = decision.p_accept;
        rec.accepted = decision.accepted;
        rec.utility = decision.accepted ? batch_new.mean : batch_cur.mean;
        if (decision.accepted) current = proposed;
    } catch (const SingularInformationError&) {
        rec.p_accept = 0.0;
        rec.accepted = false;
        rec.utility = std::numeric_limits<double>::quiet_NaN();
        rec.skipped = true;
    } catch (const DegenerateWeightError&) {
        rec.p_accept = 0.0;
        rec.accepted = false;
        rec.utility = std::numeric_limits<double>::quiet_NaN();
        rec.skipped = true;
    }
    return rec;
}

AceRunResult run_ace(const UtilityEstimator& utility, const DesignSpace& space,
                     const AceConfig& cfg, Design initial, RngStream& rng,
                     const StepObserver& observer) {
    cfg.validate();
    space.validate();
    if (initial.n_runs() != space.n || initial.n_vars() != space.v) {
        throw std::invalid_argument("run_ace: initial design dimensions do not match the space");
    }
    if (!space.design_feasible(initial)) {
        throw std::invalid_argument("run_ace: initial design violates the design space");
    }

    AceRunResult result{std::move(initial), {}};
    result.trace.reserve(cfg.phase1_sweeps * space.q());

    for (std::size_t sweep = 0; sweep < cfg.phase1_sweeps; ++sweep) {
        phase1_sweep(result.design, utility, space, cfg, rng, sweep, result.trace, observer);
    }

    if (cfg.phase2_enabled && space.n >= 2) {
        for (std::size_t iter = 0; iter < cfg.phase2_iters; ++iter) {
            TraceRecord rec =
                phase2_point_exchange(result.design, utility, space, cfg, rng, iter);
            if (result.design.n_runs() != space.n) {
                throw std::logic_error("run_ace: Phase II changed the run count");
            }
            result.trace.push_back(rec);
            if (observer) observer(result.design, result.trace.back());
        }
    }
    return result;
}

Design random_feasible_lhs(const DesignSpace& space, RngStream& rng, std::size_t max_attempts) {
    space.validate();
    std::vector<Interval> intervals(space.v);
    for (std::size_t j = 0; j < space.v; ++j) {
        intervals[j] = {space.column_domain(j).lo, space.column_domain(j).hi};
    }
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<double> delta = lhs_random_design(space.n, space.v, intervals, rng);
        // Snap to levels for finite columns.
        for (std::size_t j = 0; j < space.v; ++j) {
            const CoordinateDomain& dom = space.column_domain(j);
            if (dom.continuous()) continue;
            for (std::size_t k = 0; k < space.n; ++k) {
                double& x = delta[j * space.n + k];
                double best = dom.levels.front();
                for (double level : dom.levels) {
                    if (std::abs(level - x) < std::abs(best - x)) best = level;
                }
                x = best;
            }
        }
        Design design(space.n, space.v, std::move(delta));
        if (space.design_feasible(design)) return design;
    }
    throw std::runtime_error("random_feasible_lhs: no feasible design after bounded retries");
}

AceResult multi_start(const UtilityEstimator& utility, const DesignSpace& space,
                      const AceConfig& cfg, std::uint64_t seed,
                      const InitialDesignProvider& initial, const StepObserver& observer) {
    cfg.validate();
    const std::size_t n_starts = cfg.starts;

    AceResult result;
    result.runs.resize(n_starts);
    result.start_utility.assign(n_starts, 0.0);
    result.start_se.assign(n_starts, 0.0);

    const std::uint64_t eval_stream_base = kRunStreamBase + n_starts;

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure_message;
    std::mutex failure_mutex;

    const auto worker = [&]() {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= n_starts || failed.load()) break;
            try {
                RngStream run_rng(seed, kRunStreamBase + k);
                Design start_design = initial ? initial(k, run_rng)
                                              : random_feasible_lhs(space, run_rng);
                result.runs[k] = run_ace(utility, space, cfg, std::move(start_design), run_rng,
                                         observer);

                // C fresh comparison-grade evaluations of the final design.
                std::vector<double> reps(cfg.final_reps);
                for (std::size_t c = 0; c < cfg.final_reps; ++c) {
                    RngStream eval_rng(seed, eval_stream_base + k * cfg.final_reps + c);
                    reps[c] = utility.evaluate(result.runs[k].design, cfg.comparison_B, eval_rng)
                                  .mean;
                }
                double mean = 0.0;
                for (double r : reps) mean += r;
                mean /= static_cast<double>(cfg.final_reps);
                double ss = 0.0;
                for (double r : reps) ss += (r - mean) * (r - mean);
                result.start_utility[k] = mean;
                result.start_se[k] =
                    cfg.final_reps > 1
                        ? std::sqrt(ss / static_cast<double>(cfg.final_reps - 1) /
                                    static_cast<double>(cfg.final_reps))
                        : 0.0;
                ACE_LOG_INFO("start %zu finished: C-averaged utility %.6g", k, mean);
            } catch (const std::exception& e) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                if (failure_message.empty()) failure_message = e.what();
            }
        }
    };

    const std::size_t n_threads = std::max<std::size_t>(1, std::min(cfg.threads, n_starts));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& thread : pool) thread.join();
    }
    if (failed.load()) {
        throw std::runtime_error("multi_start: a start failed: " + failure_message);
    }

    std::size_t best = 0;
    for (std::size_t k = 1; k < n_starts; ++k) {
        if (result.start_utility[k] > result.start_utility[best]) best = k;
    }
    result.selected = result.runs[best].design;
    result.selected_start = best;
    for (const auto& run : result.runs) {
        for (const auto& rec : run.trace) {
            if (rec.skipped) continue;
            if (rec.accepted) {
                ++result.accepted_steps;
            } else {
                ++result.rejected_steps;
            }
        }
    }
    return result;
}

} // namespace ace
