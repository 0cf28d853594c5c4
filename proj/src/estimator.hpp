// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#pragma once

#include "numeric.hpp"
#include "reservoir.hpp"
#include "wasserstein1d.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace reswd {

struct ReswdConfig {
    int total_projections = 64;  // L = K + M
    int fresh_count = 8;         // M
    double p = 2.0;
    double alpha = 0.5;
    double tau = 0.0;
    std::uint64_t seed = 0;

    int reservoir_capacity() const noexcept { return total_projections - fresh_count; }
    /// Throws Error(Config) when an invariant is violated.
    void validate() const;
};

struct EstimateResult {
    double value = 0.0;
    SampleSet grad;  // d value / d X with importance weights held constant
    double ess = 0.0;
    bool flushed = false;
    bool degenerate = false;
    std::vector<double> per_direction_costs;  // one per evaluated direction (pool order)
    std::vector<double> weights;              // weight of each contributing direction
    std::vector<Direction> directions;        // contributing directions
    std::size_t cost_evaluations = 0;
};

/// Plain Monte Carlo sliced estimate over L fresh uniform directions.
EstimateResult swd_estimate(const SampleSet &x, const SampleSet &y, int projections, double p,
                            Rng &rng);

/// One reservoir step at optimisation step t. Returns the estimate and the
/// reservoir to carry into step t + 1 (empty after an ESS flush).
std::pair<EstimateResult, Reservoir> reswd_step(const SampleSet &x, const SampleSet &y,
                                                Reservoir reservoir, const ReswdConfig &cfg,
                                                std::int64_t t, Rng &rng);

/// Owns the reservoir, generator and scratch space of one optimisation run.
class ReswdEstimator {
public:
    explicit ReswdEstimator(const ReswdConfig &cfg);

    /// Advances the step counter and evaluates the estimator at (x, y).
    EstimateResult step(const SampleSet &x, const SampleSet &y);

    const ReswdConfig &config() const noexcept { return cfg_; }
    const Reservoir &reservoir() const noexcept { return reservoir_; }
    void set_reservoir(Reservoir r);
    std::int64_t steps_taken() const noexcept { return t_; }
    Rng &rng() noexcept { return rng_; }

private:
    ReswdConfig cfg_;
    Reservoir reservoir_;
    Rng rng_;
    std::int64_t t_ = 0;
};

}  // namespace reswd
