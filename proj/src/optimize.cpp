// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#include "optimize.hpp"

#include "error.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <chrono>
#include <cmath>
#include <ostream>

namespace reswd {

const char *method_name(Method m) { return m == Method::Swd ? "swd" : "reswd"; }

AdamState::AdamState(std::size_t n_params, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n_params, 0.0), v_(n_params, 0.0) {
    require(lr > 0.0, "Adam: lr must be positive");
    require(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0,
            "Adam: betas must lie in (0, 1)");
    require(eps > 0.0, "Adam: eps must be positive");
}

void AdamState::update(std::span<double> params, std::span<const double> grad) {
    require(params.size() == m_.size() && grad.size() == m_.size(), "Adam: shape mismatch");
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        const double mh = m_[i] / c1;
        const double vh = v_[i] / c2;
        params[i] -= lr_ * mh / (std::sqrt(vh) + eps_);
    }
}

Optimizer::Optimizer(const OptimizerSpec &spec, std::size_t n_params) : spec_(spec) {
    require(spec.lr > 0.0, "optimizer: lr must be positive");
    if (spec.kind == OptimizerSpec::Kind::Adam)
        adam_ = std::make_unique<AdamState>(n_params, spec.lr, spec.beta1, spec.beta2, spec.eps);
}

void Optimizer::update(std::span<double> params, std::span<const double> grad) {
    if (adam_) {
        adam_->update(params, grad);
        return;
    }
    require(params.size() == grad.size(), "SGD: shape mismatch");
    for (std::size_t i = 0; i < params.size(); ++i)
        params[i] -= spec_.lr * grad[i];
}

SlicedLoss::SlicedLoss(Method method, const ReswdConfig &cfg)
    : method_(method), cfg_(cfg), rng_(cfg.seed), reswd_(cfg) {
    cfg_.validate();
}

EstimateResult SlicedLoss::evaluate(const SampleSet &x, const SampleSet &y) {
    if (method_ == Method::Swd)
        return swd_estimate(x, y, cfg_.total_projections, cfg_.p, rng_);
    return reswd_.step(x, y);
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

MatchReport match_particles(const SampleSet &x0, const SampleSet &y, const ReswdConfig &cfg,
                            int steps, const OptimizerSpec &opt, Method method) {
    cfg.validate();
    require(steps >= 1, "match_particles: steps must be >= 1");
    require(x0.dim() == y.dim(), "match_particles: dimension mismatch");

    SampleSet x = x0;
    SlicedLoss loss(method, cfg);
    Optimizer optimizer(opt, x.values().size());
    MatchReport report;
    report.steps.reserve(static_cast<std::size_t>(steps));
    for (int t = 1; t <= steps; ++t) {
        const double w1 = true_marginal_w1(x, y);
        const auto start = Clock::now();
        EstimateResult est = loss.evaluate(x, y);
        if (!std::isfinite(est.value) || !est.grad.all_finite())
            fail(ErrorKind::Numeric, fmt::format("match_particles: non-finite loss at step {}", t));
        optimizer.update(x.values(), est.grad.values());
        report.steps.push_back({t, est.value, w1, ms_since(start)});
        if (!x.all_finite())
            fail(ErrorKind::Numeric,
                 fmt::format("match_particles: non-finite samples after step {}", t));
    }
    report.final_mean_w1 = true_marginal_w1(x, y);
    report.final_samples = std::move(x);
    return report;
}

FitResult fit_transform(std::vector<double> params0, const ParametricTransform &transform,
                        const SampleSet &y, const ReswdConfig &cfg, int steps,
                        const OptimizerSpec &opt, Method method) {
    cfg.validate();
    require(steps >= 1, "fit_transform: steps must be >= 1");
    require(params0.size() == transform.num_params(), "fit_transform: parameter count mismatch");

    std::vector<double> params = std::move(params0);
    auto forward = [&](int t) {
        SampleSet out = transform.apply(params);
        if (!out.all_finite())
            fail(ErrorKind::Numeric,
                 fmt::format("fit_transform: non-finite transform output at step {}; params [{}]",
                             t, fmt::join(params, ", ")));
        require(out.dim() == y.dim(),
                "fit_transform: transform output dimension differs from target");
        return out;
    };

    SlicedLoss loss(method, cfg);
    Optimizer optimizer(opt, params.size());
    FitResult fit;
    fit.report.steps.reserve(static_cast<std::size_t>(steps));
    for (int t = 1; t <= steps; ++t) {
        const auto start = Clock::now();
        SampleSet x = forward(t);
        const auto metric_start = Clock::now();
        const double w1 = true_marginal_w1(x, y);
        const double metric_ms = ms_since(metric_start);
        EstimateResult est = loss.evaluate(x, y);
        if (!std::isfinite(est.value))
            fail(ErrorKind::Numeric,
                 fmt::format("fit_transform: non-finite loss at step {}; params [{}]", t,
                             fmt::join(params, ", ")));
        const std::vector<double> grad = transform.pullback(params, est.grad);
        optimizer.update(params, grad);
        fit.report.steps.push_back({t, est.value, w1, ms_since(start) - metric_ms});
    }
    fit.report.final_mean_w1 = true_marginal_w1(forward(steps + 1), y);
    fit.report.final_params = params;
    fit.params = std::move(params);
    return fit;
}

void write_report_csv(std::ostream &out, const MatchReport &report, bool timing) {
    out << "step,loss,mean_w1,wall_ms\n";
    for (const auto &r : report.steps)
        out << fmt::format("{},{},{},{}\n", r.step, r.loss, r.mean_w1, timing ? r.wall_ms : 0.0);
}

}  // namespace reswd
