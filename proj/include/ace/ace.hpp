#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ace/domain.hpp"
#include "ace/rng.hpp"
#include "ace/utility.hpp"

namespace ace {

struct AceConfig {
    std::size_t comparison_B = 20000;  // acceptance-test / final-evaluation sample size
    std::size_t emulator_B = 1000;     // coordinate-design and Phase-II scan sample size
    std::size_t m = 20;                // coordinate-design size
    std::size_t phase1_sweeps = 20;    // N_I
    std::size_t phase2_iters = 100;    // N_II
    std::size_t starts = 20;           // M
    std::size_t final_reps = 20;       // C
    std::size_t n_grid = 10000;        // emulator maximization candidates
    bool phase2_enabled = true;
    std::size_t threads = 1;           // multi-start workers

    void validate() const;
};

enum class AcePhase { I, II };

struct TraceRecord {
    AcePhase phase = AcePhase::I;
    std::size_t sweep = 0;   // Phase-I sweep or Phase-II iteration
    std::size_t index = 0;   // coordinate index or removed-point index
    double utility = 0.0;    // fresh estimate at the post-step current design
    double p_accept = 0.0;
    bool accepted = false;
    bool skipped = false;    // no proposal (constant response / empty slice)
};

struct AcceptDecision {
    double p_accept = 0.5;
    bool accepted = false;
};

/// Bayesian test of the difference in expected utility between a proposed
/// and the current design, from two independent equally-sized batches:
/// p = 1 - T_{2B-2}( -B (mean_new - mean_cur) / sqrt(2 B nu) ) with nu the
/// pooled variance; accepted with probability p using one uniform draw.
/// Zero pooled variance degrades to p = 0.5 on equal means, else 0/1 by sign.
AcceptDecision bayes_t_accept(const UtilitySampleBatch& proposed,
                              const UtilitySampleBatch& current, RngStream& rng);

using StepObserver = std::function<void(const Design&, const TraceRecord&)>;

/// Steps 1a-1d for one coordinate: LHS coordinate-design, cheap utility
/// evaluations, GP fit, grid maximization, and the acceptance test with two
/// fresh comparison-grade batches. `current` is updated in place.
TraceRecord phase1_coordinate_step(Design& current, std::size_t coord,
                                   const UtilityEstimator& utility, const DesignSpace& space,
                                   const AceConfig& cfg, RngStream& rng);

/// One Phase-I sweep over all q coordinates in order.
void phase1_sweep(Design& current, const UtilityEstimator& utility, const DesignSpace& space,
                  const AceConfig& cfg, RngStream& rng, std::size_t sweep_index,
                  std::vector<TraceRecord>& trace, const StepObserver& observer = {});

/// One Phase-II iteration: append the best run copy, delete the best row,
/// test the result against the current design. Run count is preserved.
TraceRecord phase2_point_exchange(Design& current, const UtilityEstimator& utility,
                                  const DesignSpace& space, const AceConfig& cfg, RngStream& rng,
                                  std::size_t iteration);

struct AceRunResult {
    Design design;
    std::vector<TraceRecord> trace;
};

/// One full start: N_I Phase-I sweeps then (when enabled and n >= 2)
/// N_II Phase-II iterations. The initial design must be feasible.
AceRunResult run_ace(const UtilityEstimator& utility, const DesignSpace& space,
                     const AceConfig& cfg, Design initial, RngStream& rng,
                     const StepObserver& observer = {});

/// Random Latin hypercube design over the space's column domains, redrawn
/// until it satisfies the constraint (bounded retries).
Design random_feasible_lhs(const DesignSpace& space, RngStream& rng,
                           std::size_t max_attempts = 10000);

using InitialDesignProvider = std::function<Design(std::size_t start, RngStream&)>;

struct AceResult {
    Design selected;
    std::size_t selected_start = 0;
    std::vector<double> start_utility;  // C-averaged estimate per start
    std::vector<double> start_se;       // standard error of that average
    std::vector<AceRunResult> runs;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
};

/// M independent starts (parallel when cfg.threads > 1) from random LHS
/// initial designs, each final design evaluated C times at comparison grade;
/// returns the argmax of the C-averaged estimates, ties to the lowest start
/// index. All randomness derives from (seed, fixed stream offsets), so the
/// result does not depend on thread scheduling.
AceResult multi_start(const UtilityEstimator& utility, const DesignSpace& space,
                      const AceConfig& cfg, std::uint64_t seed,
                      const InitialDesignProvider& initial = {},
                      const StepObserver& observer = {});

} // namespace ace
