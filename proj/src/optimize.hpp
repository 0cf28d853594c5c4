// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#pragma once

#include "estimator.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace reswd {

enum class Method { Swd, Reswd };

const char *method_name(Method m);

struct OptimizerSpec {
    enum class Kind { Adam, Sgd };
    Kind kind = Kind::Adam;
    double lr = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Bias-corrected Adam.
class AdamState {
public:
    AdamState(std::size_t n_params, double lr, double beta1 = 0.9, double beta2 = 0.999,
              double eps = 1e-8);

    void update(std::span<double> params, std::span<const double> grad);
    std::int64_t step() const noexcept { return t_; }
    std::span<const double> first_moment() const noexcept { return m_; }
    std::span<const double> second_moment() const noexcept { return v_; }

private:
    double lr_, beta1_, beta2_, eps_;
    std::vector<double> m_, v_;
    std::int64_t t_ = 0;
};

/// Adam or plain gradient descent behind one interface.
class Optimizer {
public:
    Optimizer(const OptimizerSpec &spec, std::size_t n_params);
    void update(std::span<double> params, std::span<const double> grad);

private:
    OptimizerSpec spec_;
    std::unique_ptr<AdamState> adam_;
};

/// SWD or ReSWD loss with its own generator, seeded from cfg.seed.
class SlicedLoss {
public:
    SlicedLoss(Method method, const ReswdConfig &cfg);
    EstimateResult evaluate(const SampleSet &x, const SampleSet &y);

private:
    Method method_;
    ReswdConfig cfg_;
    Rng rng_;
    ReswdEstimator reswd_;
};

struct StepRecord {
    std::int64_t step;  // 1-based
    double loss;        // estimator value at the pre-update state
    double mean_w1;     // true marginal W1 at the same state
    double wall_ms;     // estimate + update
};

struct MatchReport {
    std::vector<StepRecord> steps;
    SampleSet final_samples;           // particle matching
    std::vector<double> final_params;  // transform fitting
    double final_mean_w1 = 0.0;        // after the last update
    std::vector<std::string> warnings;
};

MatchReport match_particles(const SampleSet &x0, const SampleSet &y, const ReswdConfig &cfg,
                            int steps, const OptimizerSpec &opt, Method method);

/// Differentiable map from a parameter vector to a sample set.
class ParametricTransform {
public:
    virtual ~ParametricTransform() = default;
    virtual std::size_t num_params() const = 0;
    virtual SampleSet apply(std::span<const double> params) const = 0;
    /// Gradient w.r.t. params given the gradient w.r.t. the output samples.
    virtual std::vector<double> pullback(std::span<const double> params,
                                         const SampleSet &grad_out) const = 0;
};

struct FitResult {
    std::vector<double> params;
    MatchReport report;
};

FitResult fit_transform(std::vector<double> params0, const ParametricTransform &transform,
                        const SampleSet &y, const ReswdConfig &cfg, int steps,
                        const OptimizerSpec &opt, Method method);

/// Columns: step,loss,mean_w1,wall_ms. `timing == false` writes wall_ms as 0.
void write_report_csv(std::ostream &out, const MatchReport &report, bool timing = true);

}  // namespace reswd
